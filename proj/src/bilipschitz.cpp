#include "oelab/bilipschitz.hpp"

#include <cmath>
#include <set>

#include "oelab/errors.hpp"

namespace oelab {

namespace {

constexpr double pivot_floor = 1e-12;

template <class... F>
struct Overloaded : F... {
    using F::operator()...;
};
template <class... F>
Overloaded(F...) -> Overloaded<F...>;

// Row operations applied to a working matrix, recorded as their inverses.
class Eliminator {
public:
    explicit Eliminator(RealMatrix m) : m_(std::move(m)) {}

    void add_row(int target, int source, double lambda)
    {
        if (lambda == 0.0)
            return;
        m_.row(target) += lambda * m_.row(source);
        factors_.push_back(make_shear(target, source, -lambda));
    }

    void flip_row(int i)
    {
        m_.row(i) *= -1.0;
        factors_.push_back(SignFlip{i});
    }

    // P = E1 E2 E1 F_i with E1 = I + e_i e_jᵀ, E2 = I − e_j e_iᵀ.
    void swap_rows(int i, int j)
    {
        flip_row(i);
        add_row(i, j, 1.0);
        add_row(j, i, -1.0);
        add_row(i, j, 1.0);
    }

    RealMatrix& m() { return m_; }
    std::vector<ElementaryOp> factors() && { return std::move(factors_); }

private:
    RealMatrix m_;
    std::vector<ElementaryOp> factors_;
};

std::int64_t floor_product(double lambda, std::int64_t x)
{
    const double y = std::floor(lambda * static_cast<double>(x));
    if (!(std::abs(y) < 9.0e18))
        throw BudgetExceeded("floor shear overflows 64-bit integers");
    return static_cast<std::int64_t>(y);
}

void check_index(int i, std::size_t dim)
{
    if (i < 0 || static_cast<std::size_t>(i) >= dim)
        throw DimensionMismatch("elementary operation index out of range");
}

} // namespace

Shear make_shear(int target, int source, double lambda)
{
    if (target == source)
        throw PreconditionError("a shear needs distinct target and source coordinates");
    if (!std::isfinite(lambda))
        throw PreconditionError("shear parameter must be finite");
    return Shear{target, source, lambda, format_real(lambda)};
}

ElementaryOp inverse_op(const ElementaryOp& op)
{
    return std::visit(Overloaded{[](const Shear& s) -> ElementaryOp { return make_shear(s.target, s.source, -s.lambda); },
                                 [](const SignFlip& f) -> ElementaryOp { return f; }},
                      op);
}

RealMatrix op_matrix(const ElementaryOp& op, int dim)
{
    RealMatrix m = RealMatrix::Identity(dim, dim);
    std::visit(Overloaded{[&](const Shear& s) { m(s.target, s.source) = s.lambda; },
                          [&](const SignFlip& f) { m(f.coordinate, f.coordinate) = -1.0; }},
               op);
    return m;
}

RealMatrix product_of(const std::vector<ElementaryOp>& ops, int dim)
{
    RealMatrix m = RealMatrix::Identity(dim, dim);
    for (const auto& op : ops)
        m = m * op_matrix(op, dim);
    return m;
}

nlohmann::json ops_to_json(const std::vector<ElementaryOp>& ops)
{
    auto j = nlohmann::json::array();
    for (const auto& op : ops)
        std::visit(Overloaded{[&](const Shear& s) {
                                  j.push_back({{"shear", {s.target + 1, s.source + 1, s.text}}});
                              },
                              [&](const SignFlip& f) { j.push_back({{"sign_flip", f.coordinate + 1}}); }},
                   op);
    return j;
}

std::vector<ElementaryOp> decompose_unimodular(const RealMatrix& A, double tol)
{
    if (A.rows() != A.cols() || A.rows() == 0)
        throw PreconditionError("decomposition needs a non-empty square matrix");
    if (!A.allFinite())
        throw PreconditionError("matrix has non-finite entries");
    const double det = A.determinant();
    if (std::abs(std::abs(det) - 1.0) > tol)
        throw PreconditionError("|det A| = " + format_real(std::abs(det)) + " is not 1 within tolerance");

    const int d = static_cast<int>(A.rows());
    Eliminator e(A);
    auto& m = e.m();
    for (int c = 0; c + 1 < d; ++c) {
        if (m(c, c) != 1.0) {
            int pivot = c;
            for (int r = c + 1; r < d; ++r)
                if (std::abs(m(r, c)) > std::abs(m(pivot, c)))
                    pivot = r;
            if (std::abs(m(pivot, c)) < pivot_floor)
                throw PreconditionError("numerically degenerate input: pivot below 1e-12");
            if (pivot != c)
                e.swap_rows(c, pivot);
            if (m(c, c) != 1.0) {
                // Scale the pivot to 1 with shears only, using the next row.
                const int k = c + 1;
                if (std::abs(m(k, c)) < 0.5 * std::abs(m(c, c)))
                    e.add_row(k, c, 1.0);
                e.add_row(c, k, (1.0 - m(c, c)) / m(k, c));
            }
        }
        for (int i = 0; i < d; ++i)
            if (i != c && m(i, c) != 0.0)
                e.add_row(i, c, -m(i, c));
    }
    const int last = d - 1;
    if (std::abs(m(last, last)) < pivot_floor)
        throw PreconditionError("numerically degenerate input: pivot below 1e-12");
    if (m(last, last) < 0.0)
        e.flip_row(last);
    for (int i = 0; i < last; ++i)
        if (m(i, last) != 0.0)
            e.add_row(i, last, -m(i, last));
    return std::move(e).factors();
}

LatticeVector floor_shear_apply(const Shear& op, LatticeVector v)
{
    check_index(op.target, v.size());
    check_index(op.source, v.size());
    if (op.target == op.source)
        throw PreconditionError("a shear needs distinct target and source coordinates");
    v[static_cast<std::size_t>(op.target)] += floor_product(op.lambda, v[static_cast<std::size_t>(op.source)]);
    return v;
}

LatticeVector floor_op_apply(const ElementaryOp& op, LatticeVector v)
{
    return std::visit(Overloaded{[&](const Shear& s) { return floor_shear_apply(s, std::move(v)); },
                                 [&](const SignFlip& f) {
                                     check_index(f.coordinate, v.size());
                                     v[static_cast<std::size_t>(f.coordinate)] *= -1;
                                     return std::move(v);
                                 }},
                      op);
}

BiLipMap::BiLipMap(RealMatrix target, std::vector<ElementaryOp> ops) : target_(std::move(target)), ops_(std::move(ops))
{
    if (target_.rows() != target_.cols())
        throw PreconditionError("target matrix must be square");
}

LatticeVector BiLipMap::operator()(const LatticeVector& v) const
{
    if (v.size() != static_cast<std::size_t>(dim()))
        throw DimensionMismatch("vector has wrong dimension for this map");
    LatticeVector w = v;
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it)
        w = floor_op_apply(*it, std::move(w));
    return w;
}

LatticeVector BiLipMap::inverse(const LatticeVector& w) const
{
    if (w.size() != static_cast<std::size_t>(dim()))
        throw DimensionMismatch("vector has wrong dimension for this map");
    LatticeVector v = w;
    // v_target − ⌊λ v_source⌋ undoes a floor shear since v_source is unchanged.
    for (const auto& op : ops_) {
        if (const auto* s = std::get_if<Shear>(&op)) {
            v[static_cast<std::size_t>(s->target)] -= floor_product(s->lambda, v[static_cast<std::size_t>(s->source)]);
        } else {
            v = floor_op_apply(op, std::move(v));
        }
    }
    return v;
}

void to_json(nlohmann::json& j, const BiLipMap& f)
{
    j = {{"matrix", matrix_to_json(f.matrix())}, {"ops", ops_to_json(f.ops())}};
}

BiLipMap realize_bilipschitz(const RealMatrix& A, double tol) { return BiLipMap(A, decompose_unimodular(A, tol)); }

std::vector<LatticeVector> box_points(int dim, int radius)
{
    if (dim < 1 || radius < 0)
        throw PreconditionError("box needs dim >= 1 and radius >= 0");
    std::vector<LatticeVector> out;
    LatticeVector v(static_cast<std::size_t>(dim), -radius);
    while (true) {
        out.push_back(v);
        int i = dim - 1;
        while (i >= 0 && v[static_cast<std::size_t>(i)] == radius)
            v[static_cast<std::size_t>(i--)] = -radius;
        if (i < 0)
            break;
        ++v[static_cast<std::size_t>(i)];
    }
    return out;
}

void to_json(nlohmann::json& j, const DistanceReport& r)
{
    j = {{"R", r.radius}, {"constant", r.constant}};
    if (r.witness)
        j["witness"] = *r.witness;
}

DistanceReport bounded_distance_constant(const BiLipMap& f, const RealMatrix& A, int radius)
{
    if (A.rows() != f.dim() || A.cols() != f.dim())
        throw DimensionMismatch("matrix dimension differs from the map");
    DistanceReport r;
    r.radius = radius;
    Eigen::VectorXd x(f.dim());
    for (const auto& v : box_points(f.dim(), radius)) {
        for (int i = 0; i < f.dim(); ++i)
            x(i) = static_cast<double>(v[static_cast<std::size_t>(i)]);
        const Eigen::VectorXd ax = A * x;
        const auto fv = f(v);
        double dist = 0.0;
        for (int i = 0; i < f.dim(); ++i)
            dist = std::max(dist, std::abs(static_cast<double>(fv[static_cast<std::size_t>(i)]) - ax(i)));
        if (dist > r.constant) {
            r.constant = dist;
            r.witness = v;
        }
    }
    return r;
}

std::vector<DistanceReport> distance_profile(const BiLipMap& f, const RealMatrix& A, const std::vector<int>& radii)
{
    std::vector<DistanceReport> out;
    for (int r : radii)
        out.push_back(bounded_distance_constant(f, A, r));
    return out;
}

Verdict injectivity_check_on_box(const std::function<LatticeVector(const LatticeVector&)>& f, int dim, int radius)
{
    Verdict v("injective on box");
    std::map<LatticeVector, LatticeVector> seen;
    const auto points = box_points(dim, radius);
    for (const auto& p : points) {
        auto image = f(p);
        auto [it, inserted] = seen.emplace(image, p);
        if (!inserted && !v.saturated())
            v.fail({{"first", it->second}, {"second", p}, {"image", image}});
    }
    v.info = {{"R", radius}, {"points", points.size()}};
    return v;
}

Morphism<LatticeVector> orbit_morphism(const BiLipMap& f)
{
    return translation_orbit_morphism([f](const LatticeVector& t) { return f(t); }, f.dim(), "orbit cocycle of f_A");
}

Morphism<LatticeVector> inverse_orbit_morphism(const BiLipMap& f)
{
    return translation_orbit_morphism([f](const LatticeVector& t) { return f.inverse(t); }, f.dim(),
                                      "orbit cocycle of f_A^-1");
}

void to_json(nlohmann::json& j, const ExtractedMap& m)
{
    auto images = nlohmann::json::array();
    for (const auto& [g, image] : m.images)
        images.push_back({g, image});
    j = {{"R", m.radius}, {"constant", m.constant}, {"images", images}, {"certificate", m.certificate}};
}

} // namespace oelab
