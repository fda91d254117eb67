#pragma once

#include <functional>
#include <span>
#include <string>

#include "json.hpp"
#include "oelab/errors.hpp"
#include "oelab/group.hpp"
#include "oelab/linalg.hpp"
#include "oelab/odometer.hpp"
#include "oelab/verdict.hpp"

namespace oelab {

/**
 * An orbit-equivalence morphism between two actions on point sets of type P:
 * the point map φ together with the orbit cocycle α, which satisfy
 * φ(g·x) = α(g, x)·φ(x).
 */
template <class P>
struct Morphism {
    using Action = std::function<P(const GroupElement&, const P&)>;

    std::string provenance;
    Group source;
    Group target;
    Action source_act;
    Action target_act;
    std::function<P(const P&)> point_map;
    std::function<GroupElement(const GroupElement&, const P&)> cocycle;
};

/// η ∘ θ: φ = φ_η φ_θ and α(g, x) = α_η(α_θ(g, x), φ_θ(x)).
template <class P>
Morphism<P> compose_morphisms(const Morphism<P>& eta, const Morphism<P>& theta)
{
    if (!(theta.target == eta.source))
        throw DimensionMismatch("compose_morphisms: target of the first is not the source of the second");
    Morphism<P> out;
    out.provenance = "(" + eta.provenance + ") o (" + theta.provenance + ")";
    out.source = theta.source;
    out.target = eta.target;
    out.source_act = theta.source_act;
    out.target_act = eta.target_act;
    out.point_map = [eta, theta](const P& x) { return eta.point_map(theta.point_map(x)); };
    out.cocycle = [eta, theta](const GroupElement& g, const P& x) {
        return eta.cocycle(theta.cocycle(g, x), theta.point_map(x));
    };
    return out;
}

/// α(gh, x) = α(g, h·x) α(h, x) for all listed g, h, x.
template <class P>
Verdict check_cocycle_identity(const Morphism<P>& eta, std::span<const GroupElement> elements,
                               std::span<const P> points)
{
    Verdict v("cocycle identity");
    std::size_t checked = 0;
    for (const auto& x : points)
        for (const auto& g : elements)
            for (const auto& h : elements) {
                const auto lhs = eta.cocycle(g * h, x);
                const auto rhs = eta.cocycle(g, eta.source_act(h, x)) * eta.cocycle(h, x);
                ++checked;
                if (lhs != rhs && !v.saturated())
                    v.fail({{"g", g}, {"h", h}, {"x", x}, {"alpha(gh,x)", lhs}, {"alpha(g,hx)alpha(h,x)", rhs}});
                else if (lhs != rhs)
                    v.pass = false;
            }
    v.info["checked"] = checked;
    return v;
}

/// φ(g·x) = α(g, x)·φ(x).
template <class P>
Verdict check_equivariance(const Morphism<P>& eta, std::span<const GroupElement> elements,
                           std::span<const P> points)
{
    Verdict v("orbit equivariance");
    std::size_t checked = 0;
    for (const auto& x : points)
        for (const auto& g : elements) {
            const auto lhs = eta.point_map(eta.source_act(g, x));
            const auto rhs = eta.target_act(eta.cocycle(g, x), eta.point_map(x));
            ++checked;
            if (!(lhs == rhs)) {
                if (v.saturated())
                    v.pass = false;
                else
                    v.fail({{"g", g}, {"x", x}});
            }
        }
    v.info["checked"] = checked;
    return v;
}

/**
 * The three inverse identities of a morphism and its inverse:
 *   α_{η⁻¹}(α_η(g, x), φ_η(x)) = g with φ_{η⁻¹}(φ_η(x)) = x,
 *   α_{η⁻¹}(α_η(g, g⁻¹x), α_η(g, g⁻¹x)⁻¹ φ_η(x)) = g,
 *   φ_η(g⁻¹x) = α_η(g, g⁻¹x)⁻¹ φ_η(x).
 */
template <class P>
Verdict check_inverse_identities(const Morphism<P>& eta, const Morphism<P>& eta_inv,
                                 std::span<const GroupElement> elements, std::span<const P> points)
{
    Verdict v("inverse cocycle identities");
    std::size_t checked = 0;
    auto record = [&](const char* which, const GroupElement& g, const P& x) {
        if (v.saturated())
            v.pass = false;
        else
            v.fail({{"identity", which}, {"g", g}, {"x", x}});
    };
    for (const auto& x : points) {
        const auto fx = eta.point_map(x);
        ++checked;
        if (!(eta_inv.point_map(fx) == x))
            record("point inverse", eta.source.identity(), x);
        for (const auto& g : elements) {
            checked += 3;
            if (eta_inv.cocycle(eta.cocycle(g, x), fx) != g)
                record("inverse cocycle", g, x);
            const auto y = eta.source_act(inverse(g), x);
            const auto lambda = eta.cocycle(g, y);
            const auto moved = eta.target_act(inverse(lambda), fx);
            if (eta_inv.cocycle(lambda, moved) != g)
                record("inverse cocycle at g^-1 x", g, x);
            if (!(eta.point_map(y) == moved))
                record("inverse equivariance", g, x);
        }
    }
    v.info["checked"] = checked;
    return v;
}

/// A lattice vector as a group element.
inline GroupElement lattice_element(std::span<const std::int64_t> v)
{
    return GroupElement::lattice(LatticeVector(v.begin(), v.end()));
}

/**
 * The Gromov cocycle of a bijection f of Z^d along one orbit, in
 * coordinates: the point t stands for the normalized translate
 * ψ_t(h) = f(t + h) − f(t). Then g·t = t − g, λ·s = s − λ, φ = f and
 * α(g, t) = f(t) − f(t − g). Exact at every scale.
 */
Morphism<LatticeVector> translation_orbit_morphism(std::function<LatticeVector(const LatticeVector&)> f, int dim,
                                                   std::string provenance);

/// The odometer example: φ = multiplication by A on prod Z_p, α(g, x) = A g.
Morphism<DigitPoint> odometer_constant_morphism(const IntMatrix& A, const OdometerSpace& space);

/// α(g, x) = g, φ = id.
template <class P>
Morphism<P> trivial_morphism(Group group, typename Morphism<P>::Action act)
{
    Morphism<P> out;
    out.provenance = "identity";
    out.source = group;
    out.target = group;
    out.source_act = act;
    out.target_act = act;
    out.point_map = [](const P& x) { return x; };
    out.cocycle = [](const GroupElement& g, const P&) { return g; };
    return out;
}

} // namespace oelab
