#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "oelab/cocycle.hpp"
#include "oelab/errors.hpp"
#include "oelab/linalg.hpp"
#include "oelab/verdict.hpp"

namespace oelab {

/// Element of Λ*R^d; subsets of {1..d} are bitmasks, bit i standing for e_{i+1}.
class ExteriorElement {
public:
    explicit ExteriorElement(int dim);
    static ExteriorElement basis(int dim, unsigned mask, double coefficient = 1.0);
    /// e_{i+1}, 0-based.
    static ExteriorElement vector(int dim, int i);
    static ExteriorElement from_vector(const Eigen::VectorXd& v);

    int dim() const { return dim_; }
    const std::map<unsigned, double>& coefficients() const { return coeff_; }
    double coefficient(unsigned mask) const;
    void add(unsigned mask, double value);

    ExteriorElement& operator+=(const ExteriorElement& other);
    ExteriorElement operator+(const ExteriorElement& other) const;
    ExteriorElement operator*(double s) const;

private:
    int dim_;
    std::map<unsigned, double> coeff_;
};

void to_json(nlohmann::json& j, const ExteriorElement& u);

/// Sign of e_a ∧ e_b relative to e_{a|b}; zero when a and b overlap.
int shuffle_sign(unsigned a, unsigned b);
ExteriorElement wedge(const ExteriorElement& u, const ExteriorElement& v);
double max_abs_difference(const ExteriorElement& u, const ExteriorElement& v);

/// Size-k subsets of {0..d-1} as ascending bitmasks.
std::vector<unsigned> subsets_of_size(int dim, int k);

/// A degree-preserving linear endomorphism of Λ*R^d, one matrix per degree.
struct GradedEndomorphism {
    int dim = 0;
    /// degree[k] is indexed by subsets_of_size(dim, k).
    std::vector<RealMatrix> degree;

    ExteriorElement apply(const ExteriorElement& u) const;
};

/// Λ(M): degree 1 is M, degree k the k-th exterior power, degree d the determinant.
GradedEndomorphism induced_map(const RealMatrix& M);

/// The invariant matrix on the bounded-distance side, with its cohomology transpose.
struct InvariantMatrix {
    RealMatrix matrix;
    RealMatrix cohomology_side;
    double det = 0.0;
    double error_bound = 0.0;
    int n = 0;
    std::size_t samples = 0;
    double constant = 0.0;
    std::string cocycle;
    std::string measure = "uniform average over the given samples";
};

void to_json(nlohmann::json& j, const InvariantMatrix& m);

InvariantMatrix make_invariant(RealMatrix matrix, int n, std::size_t samples, double constant, std::string cocycle);

/// Column i: α(n e_i, (−n e_i)·x) / n at the single point x.
template <class P>
RealMatrix psi1_at(const Morphism<P>& eta, int n, const P& x)
{
    if (eta.source.kind != GroupKind::lattice || eta.target.kind != GroupKind::lattice)
        throw PreconditionError("psi1 needs lattice source and target groups");
    if (n < 1)
        throw PreconditionError("psi1 needs n >= 1");
    const int d = eta.source.rank;
    RealMatrix m = RealMatrix::Zero(eta.target.rank, d);
    for (int i = 0; i < d; ++i) {
        LatticeVector step(static_cast<std::size_t>(d), 0);
        step[static_cast<std::size_t>(i)] = n;
        const auto g = GroupElement::lattice(step);
        const auto value = eta.cocycle(g, eta.source_act(inverse(g), x)).coords();
        for (int r = 0; r < eta.target.rank; ++r)
            m(r, i) = static_cast<double>(value[static_cast<std::size_t>(r)]) / n;
    }
    return m;
}

/**
 * Averages psi1_at over the samples. The error bound attached is C/n with C
 * the bounded-distance constant supplied by the caller.
 */
template <class P>
InvariantMatrix psi1_from_cocycle(const Morphism<P>& eta, int n, std::span<const P> samples, double constant)
{
    if (samples.empty())
        throw PreconditionError("psi1 needs at least one sample point");
    RealMatrix sum = RealMatrix::Zero(eta.target.rank, eta.source.rank);
    for (const auto& x : samples)
        sum += psi1_at(eta, n, x);
    return make_invariant(sum / static_cast<double>(samples.size()), n, samples.size(), constant, eta.provenance);
}

/// ||det M| − 1| ≤ tol.
Verdict check_det_pm1(const RealMatrix& M, double tol);

/// ‖A‖∞ (max row sum) and ‖A‖₁ (max column sum).
double norm_inf(const RealMatrix& A);
double norm_one(const RealMatrix& A);

/**
 * Worst-case bound on ‖M_{η∘θ} − M_η M_θ‖max when each single-sample
 * column has error below 2C/n: the composite error
 * (2C_η + 2‖A_η‖∞ C_θ)/n plus the product error
 * 2C_η‖A_θ‖₁/n + 2‖A_η‖∞ C_θ/n + 4d C_η C_θ/n².
 */
double functoriality_budget(const RealMatrix& A_eta, double C_eta, const RealMatrix& A_theta, double C_theta, int n);

/// ‖M_{η∘θ} − M_η M_θ‖max ≤ budget.
Verdict functoriality_check(const InvariantMatrix& composed, const InvariantMatrix& eta, const InvariantMatrix& theta,
                            double budget);

/// Λ(u ∧ v) = Λ(u) ∧ Λ(v) on all pairs of basis elements.
Verdict multiplicativity_check(const GradedEndomorphism& map, double tol = 1e-12);
Verdict multiplicativity_check(const RealMatrix& M, double tol = 1e-12);

} // namespace oelab
