#include "oelab/cocycle.hpp"

namespace oelab {

namespace {

LatticeVector minus(const LatticeVector& a, const LatticeVector& b)
{
    if (a.size() != b.size())
        throw DimensionMismatch("lattice vectors of different dimension");
    LatticeVector out = a;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] -= b[i];
    return out;
}

} // namespace

Morphism<LatticeVector> translation_orbit_morphism(std::function<LatticeVector(const LatticeVector&)> f, int dim,
                                                   std::string provenance)
{
    // Γ moves t to t − g, Λ moves s to s − λ.
    auto act = [](const GroupElement& g, const LatticeVector& t) { return minus(t, g.coords()); };
    Morphism<LatticeVector> out;
    out.provenance = std::move(provenance);
    out.source = Group::lattice(dim);
    out.target = Group::lattice(dim);
    out.source_act = act;
    out.target_act = act;
    out.point_map = f;
    out.cocycle = [f](const GroupElement& g, const LatticeVector& t) {
        return GroupElement::lattice(minus(f(t), f(minus(t, g.coords()))));
    };
    return out;
}

Morphism<DigitPoint> odometer_constant_morphism(const IntMatrix& A, const OdometerSpace& space)
{
    require_unimodular_action(A, space);
    const int d = space.dim();
    auto act = [space](const GroupElement& g, const DigitPoint& x) { return odometer_add(x, g.coords(), space); };
    Morphism<DigitPoint> out;
    out.provenance = "odometer matrix action";
    out.source = Group::lattice(d);
    out.target = Group::lattice(d);
    out.source_act = act;
    out.target_act = act;
    out.point_map = [A, space](const DigitPoint& x) { return matrix_act(A, x, space); };
    out.cocycle = [A](const GroupElement& g, const DigitPoint&) { return GroupElement::lattice(oelab::apply(A, g.coords())); };
    return out;
}

} // namespace oelab
