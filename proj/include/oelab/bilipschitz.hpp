#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "oelab/cocycle.hpp"
#include "oelab/group.hpp"
#include "oelab/linalg.hpp"

namespace oelab {

/// Elementary matrix I + λ e_target e_sourceᵀ (0-based indices).
struct Shear {
    int target = 0;
    int source = 1;
    double lambda = 0.0;
    std::string text;  // decimal form used for serialization
};

/// diag(1, ..., -1, ..., 1) with the -1 at `coordinate` (0-based).
struct SignFlip {
    int coordinate = 0;
};

using ElementaryOp = std::variant<Shear, SignFlip>;

Shear make_shear(int target, int source, double lambda);
ElementaryOp inverse_op(const ElementaryOp& op);

RealMatrix op_matrix(const ElementaryOp& op, int dim);
/// ops[0] * ops[1] * ... * ops[n-1].
RealMatrix product_of(const std::vector<ElementaryOp>& ops, int dim);

/// [{"shear":[i,j,"0.5"]},{"sign_flip":1}] with 1-based indices.
nlohmann::json ops_to_json(const std::vector<ElementaryOp>& ops);

/**
 * Writes A as a product of shears and sign flips by Gauss-Jordan
 * elimination with partial pivoting. Row swaps are emitted as three shears
 * and a sign flip. The returned factors are in product order.
 *
 * Throws PreconditionError when |det A| differs from 1 by more than tol or
 * when a pivot falls below 1e-12.
 */
std::vector<ElementaryOp> decompose_unimodular(const RealMatrix& A, double tol = 1e-9);

/// v_target += ⌊λ v_source⌋.
LatticeVector floor_shear_apply(const Shear& op, LatticeVector v);
LatticeVector floor_op_apply(const ElementaryOp& op, LatticeVector v);

/// Integer bijection of Z^d at bounded distance from a det ±1 matrix.
class BiLipMap {
public:
    BiLipMap(RealMatrix target, std::vector<ElementaryOp> ops);

    int dim() const { return static_cast<int>(target_.rows()); }
    const RealMatrix& matrix() const { return target_; }
    const std::vector<ElementaryOp>& ops() const { return ops_; }

    /// Applies the factors right to left with floor shears.
    LatticeVector operator()(const LatticeVector& v) const;
    /// Exact inverse: factors left to right, each undone at the integer level.
    LatticeVector inverse(const LatticeVector& w) const;

    GroupElement on_group(const GroupElement& g) const { return GroupElement::lattice((*this)(g.coords())); }

private:
    RealMatrix target_;
    std::vector<ElementaryOp> ops_;
};

void to_json(nlohmann::json& j, const BiLipMap& f);

BiLipMap realize_bilipschitz(const RealMatrix& A, double tol = 1e-9);

/// All integer vectors of [-R, R]^d in lexicographic order.
std::vector<LatticeVector> box_points(int dim, int radius);

struct DistanceReport {
    int radius = 0;
    double constant = 0.0;
    std::optional<LatticeVector> witness;
};

void to_json(nlohmann::json& j, const DistanceReport& r);

/// max ‖f(v) − Av‖∞ over the L∞ box of the given radius.
DistanceReport bounded_distance_constant(const BiLipMap& f, const RealMatrix& A, int radius);
std::vector<DistanceReport> distance_profile(const BiLipMap& f, const RealMatrix& A, const std::vector<int>& radii);

/// f restricted to [-R, R]^d is injective.
Verdict injectivity_check_on_box(const std::function<LatticeVector(const LatticeVector&)>& f, int dim, int radius);

/// The orbit cocycle of f on a single free Z^d-orbit, and that of f⁻¹.
Morphism<LatticeVector> orbit_morphism(const BiLipMap& f);
Morphism<LatticeVector> inverse_orbit_morphism(const BiLipMap& f);

/// A map on a ball together with the constant used to certify it.
struct ExtractedMap {
    int radius = 0;
    std::map<GroupElement, GroupElement> images;
    double constant = 0.0;
    BiLipschitzReport certificate;
};

void to_json(nlohmann::json& j, const ExtractedMap& m);

/**
 * φ(g) := α(g⁻¹, x)⁻¹ on ball(R). The constant is the largest target length
 * of α(s, y) over generators s and the orbit points y = h·x, h ∈ ball(R);
 * when the inverse cocycle is supplied its generator lengths over the image
 * points are included as well. The certificate is is_bilipschitz_on_ball
 * with that constant.
 */
template <class P>
ExtractedMap extract_bilipschitz_from_cocycle(const Morphism<P>& eta, const P& x, int radius,
                                              const WordMetric& source, const WordMetric& target,
                                              const Morphism<P>* eta_inverse = nullptr)
{
    ExtractedMap out;
    out.radius = radius;
    const auto& ball = source.ball(radius);
    double c = 0.0;
    for (const auto& h : ball) {
        const auto y = eta.source_act(h, x);
        for (const auto& s : source.generators().elements())
            c = std::max(c, static_cast<double>(target.length(eta.cocycle(s, y))));
        if (eta_inverse) {
            const auto fy = eta.point_map(y);
            for (const auto& s : target.generators().elements())
                c = std::max(c, static_cast<double>(source.length(eta_inverse->cocycle(s, fy))));
        }
    }
    out.constant = c;
    for (const auto& g : ball)
        out.images.emplace(g, oelab::inverse(eta.cocycle(oelab::inverse(g), x)));
    out.certificate = is_bilipschitz_on_ball([&](const GroupElement& g) { return out.images.at(g); }, radius, c,
                                             source, target);
    return out;
}

/**
 * ℓ(α(s_1⋯s_n, x)) ≤ C·n for the given generator words, where C is the
 * largest length of α(s, y) seen along each word's partial products.
 */
template <class P>
Verdict chain_bound_check(const Morphism<P>& eta, const P& x, const std::vector<std::vector<GroupElement>>& words,
                          const WordMetric& target)
{
    Verdict v("chain length bound");
    double c = 0.0;
    for (const auto& w : words) {
        // α(s_1⋯s_n, x) = α(s_1, s_2⋯s_n x) ⋯ α(s_n, x)
        auto y = x;
        for (auto it = w.rbegin(); it != w.rend(); ++it) {
            c = std::max(c, static_cast<double>(target.length(eta.cocycle(*it, y))));
            y = eta.source_act(*it, y);
        }
    }
    for (const auto& w : words) {
        auto g = eta.source.identity();
        for (const auto& s : w)
            g = g * s;
        const auto len = target.length(eta.cocycle(g, x));
        if (len > c * static_cast<double>(w.size()) && !v.saturated())
            v.fail({{"word_length", w.size()}, {"alpha_length", len}, {"C", c}});
    }
    v.info = {{"C", c}, {"words", words.size()}};
    return v;
}

} // namespace oelab
