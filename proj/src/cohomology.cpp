#include "oelab/cohomology.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace oelab {

namespace {

void require_dim(int dim)
{
    if (dim < 1 || dim > 16)
        throw PreconditionError("exterior algebra dimension must lie in [1, 16]");
}

} // namespace

ExteriorElement::ExteriorElement(int dim) : dim_(dim) { require_dim(dim); }

ExteriorElement ExteriorElement::basis(int dim, unsigned mask, double coefficient)
{
    ExteriorElement u(dim);
    if (mask >> dim)
        throw DimensionMismatch("basis subset exceeds the dimension");
    u.add(mask, coefficient);
    return u;
}

ExteriorElement ExteriorElement::vector(int dim, int i)
{
    if (i < 0 || i >= dim)
        throw DimensionMismatch("basis vector index out of range");
    return basis(dim, 1u << i);
}

ExteriorElement ExteriorElement::from_vector(const Eigen::VectorXd& v)
{
    ExteriorElement u(static_cast<int>(v.size()));
    for (int i = 0; i < v.size(); ++i)
        u.add(1u << i, v(i));
    return u;
}

double ExteriorElement::coefficient(unsigned mask) const
{
    auto it = coeff_.find(mask);
    return it == coeff_.end() ? 0.0 : it->second;
}

void ExteriorElement::add(unsigned mask, double value)
{
    if (value == 0.0)
        return;
    auto& c = coeff_[mask];
    c += value;
    if (c == 0.0)
        coeff_.erase(mask);
}

ExteriorElement& ExteriorElement::operator+=(const ExteriorElement& other)
{
    if (other.dim_ != dim_)
        throw DimensionMismatch("exterior elements of different dimension");
    for (const auto& [mask, c] : other.coeff_)
        add(mask, c);
    return *this;
}

ExteriorElement ExteriorElement::operator+(const ExteriorElement& other) const
{
    ExteriorElement out = *this;
    out += other;
    return out;
}

ExteriorElement ExteriorElement::operator*(double s) const
{
    ExteriorElement out(dim_);
    for (const auto& [mask, c] : coeff_)
        out.add(mask, c * s);
    return out;
}

void to_json(nlohmann::json& j, const ExteriorElement& u)
{
    j = nlohmann::json::array();
    for (const auto& [mask, c] : u.coefficients()) {
        auto subset = nlohmann::json::array();
        for (int i = 0; i < u.dim(); ++i)
            if (mask & (1u << i))
                subset.push_back(i + 1);
        j.push_back({{"subset", subset}, {"coefficient", c}});
    }
}

int shuffle_sign(unsigned a, unsigned b)
{
    if (a & b)
        return 0;
    // Count pairs i ∈ a, j ∈ b with i > j.
    int inversions = 0;
    for (unsigned rest = a; rest; rest &= rest - 1) {
        const unsigned bit = rest & (~rest + 1);
        inversions += std::popcount(b & (bit - 1));
    }
    return inversions % 2 ? -1 : 1;
}

ExteriorElement wedge(const ExteriorElement& u, const ExteriorElement& v)
{
    if (u.dim() != v.dim())
        throw DimensionMismatch("wedge of elements of different dimension");
    ExteriorElement out(u.dim());
    for (const auto& [a, x] : u.coefficients())
        for (const auto& [b, y] : v.coefficients())
            if (const int s = shuffle_sign(a, b))
                out.add(a | b, s * x * y);
    return out;
}

double max_abs_difference(const ExteriorElement& u, const ExteriorElement& v)
{
    double m = 0.0;
    for (const auto& [mask, c] : u.coefficients())
        m = std::max(m, std::abs(c - v.coefficient(mask)));
    for (const auto& [mask, c] : v.coefficients())
        m = std::max(m, std::abs(c - u.coefficient(mask)));
    return m;
}

std::vector<unsigned> subsets_of_size(int dim, int k)
{
    require_dim(dim);
    std::vector<unsigned> out;
    for (unsigned mask = 0; mask < (1u << dim); ++mask)
        if (std::popcount(mask) == k)
            out.push_back(mask);
    return out;
}

ExteriorElement GradedEndomorphism::apply(const ExteriorElement& u) const
{
    if (u.dim() != dim)
        throw DimensionMismatch("endomorphism applied to an element of another dimension");
    ExteriorElement out(dim);
    for (const auto& [mask, c] : u.coefficients()) {
        const int k = std::popcount(mask);
        const auto subsets = subsets_of_size(dim, k);
        const auto col = std::lower_bound(subsets.begin(), subsets.end(), mask) - subsets.begin();
        for (std::size_t row = 0; row < subsets.size(); ++row)
            out.add(subsets[row], c * degree[static_cast<std::size_t>(k)](static_cast<Eigen::Index>(row), col));
    }
    return out;
}

GradedEndomorphism induced_map(const RealMatrix& M)
{
    if (M.rows() != M.cols())
        throw PreconditionError("induced_map needs a square matrix");
    const int d = static_cast<int>(M.rows());
    require_dim(d);
    std::vector<ExteriorElement> columns;
    for (int i = 0; i < d; ++i)
        columns.push_back(ExteriorElement::from_vector(M.col(i)));
    GradedEndomorphism out;
    out.dim = d;
    for (int k = 0; k <= d; ++k) {
        const auto subsets = subsets_of_size(d, k);
        const auto size = static_cast<Eigen::Index>(subsets.size());
        RealMatrix block = RealMatrix::Zero(size, size);
        for (Eigen::Index c = 0; c < size; ++c) {
            // Λ^k(M) e_S = M e_{s1} ∧ ... ∧ M e_{sk}
            ExteriorElement image = ExteriorElement::basis(d, 0);
            for (int i = 0; i < d; ++i)
                if (subsets[static_cast<std::size_t>(c)] & (1u << i))
                    image = wedge(image, columns[static_cast<std::size_t>(i)]);
            for (Eigen::Index r = 0; r < size; ++r)
                block(r, c) = image.coefficient(subsets[static_cast<std::size_t>(r)]);
        }
        out.degree.push_back(std::move(block));
    }
    return out;
}

void to_json(nlohmann::json& j, const InvariantMatrix& m)
{
    j = {{"matrix", matrix_to_json(m.matrix)},
         {"cohomology_side", matrix_to_json(m.cohomology_side)},
         {"det", m.det},
         {"error_bound", m.error_bound},
         {"provenance", {{"n", m.n}, {"samples", m.samples}, {"C", m.constant}, {"cocycle", m.cocycle}}},
         {"measure", m.measure}};
}

InvariantMatrix make_invariant(RealMatrix matrix, int n, std::size_t samples, double constant, std::string cocycle)
{
    InvariantMatrix out;
    out.det = matrix.rows() == matrix.cols() ? matrix.determinant() : 0.0;
    out.cohomology_side = matrix.transpose();
    out.matrix = std::move(matrix);
    out.n = n;
    out.samples = samples;
    out.constant = constant;
    out.error_bound = constant / n;
    out.cocycle = std::move(cocycle);
    return out;
}

Verdict check_det_pm1(const RealMatrix& M, double tol)
{
    Verdict v("|det M| = 1");
    if (M.rows() != M.cols())
        throw PreconditionError("determinant of a non-square matrix");
    const double det = M.determinant();
    const double deviation = std::abs(std::abs(det) - 1.0);
    if (deviation > tol)
        v.fail({{"det", det}, {"deviation", deviation}, {"tol", tol}});
    v.info = {{"det", det}, {"deviation", deviation}, {"tol", tol}};
    return v;
}

double norm_inf(const RealMatrix& A) { return A.size() ? A.cwiseAbs().rowwise().sum().maxCoeff() : 0.0; }

double norm_one(const RealMatrix& A) { return A.size() ? A.cwiseAbs().colwise().sum().maxCoeff() : 0.0; }

double functoriality_budget(const RealMatrix& A_eta, double C_eta, const RealMatrix& A_theta, double C_theta, int n)
{
    const double nn = n;
    const double d = static_cast<double>(A_eta.rows());
    const double composite = (2.0 * C_eta + 2.0 * norm_inf(A_eta) * C_theta) / nn;
    const double product = 2.0 * C_eta * norm_one(A_theta) / nn + 2.0 * norm_inf(A_eta) * C_theta / nn +
                           4.0 * d * C_eta * C_theta / (nn * nn);
    return composite + product;
}

Verdict functoriality_check(const InvariantMatrix& composed, const InvariantMatrix& eta, const InvariantMatrix& theta,
                            double budget)
{
    Verdict v("psi1 is functorial");
    const RealMatrix product = eta.matrix * theta.matrix;
    if (product.rows() != composed.matrix.rows() || product.cols() != composed.matrix.cols())
        throw DimensionMismatch("functoriality: matrix sizes differ");
    const double error = (composed.matrix - product).cwiseAbs().maxCoeff();
    if (error > budget)
        v.fail({{"error", error}, {"budget", budget}, {"composed", matrix_to_json(composed.matrix)},
                {"product", matrix_to_json(product)}});
    v.info = {{"error", error}, {"budget", budget}, {"product", matrix_to_json(product)}};
    return v;
}

Verdict multiplicativity_check(const GradedEndomorphism& map, double tol)
{
    Verdict v("induced map respects the wedge product");
    const int d = map.dim;
    std::size_t pairs = 0;
    double worst = 0.0;
    for (unsigned a = 0; a < (1u << d); ++a)
        for (unsigned b = 0; b < (1u << d); ++b) {
            if (std::popcount(a) + std::popcount(b) > d)
                continue;
            const auto u = ExteriorElement::basis(d, a);
            const auto w = ExteriorElement::basis(d, b);
            const auto lhs = map.apply(wedge(u, w));
            const auto rhs = wedge(map.apply(u), map.apply(w));
            double scale = 1.0;
            for (const auto& [mask, c] : rhs.coefficients())
                scale = std::max(scale, std::abs(c));
            const double diff = max_abs_difference(lhs, rhs);
            worst = std::max(worst, diff / scale);
            ++pairs;
            if (diff > tol * scale && !v.saturated())
                v.fail({{"u", u}, {"v", w}, {"difference", diff}});
            else if (diff > tol * scale)
                v.pass = false;
        }
    v.info = {{"pairs", pairs}, {"max_relative_difference", worst}, {"tol", tol}};
    return v;
}

Verdict multiplicativity_check(const RealMatrix& M, double tol) { return multiplicativity_check(induced_map(M), tol); }

} // namespace oelab
