#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "oelab/cocycle.hpp"
#include "oelab/group.hpp"
#include "oelab/odometer.hpp"
#include "oelab/verdict.hpp"

namespace oelab {

/// A map ψ : ball_Γ(radius) → Λ stored as an exact table.
struct MapTable {
    int radius = 0;
    std::map<GroupElement, GroupElement> values;

    /// Throws TruncationError outside the table.
    const GroupElement& at(const GroupElement& h) const;
    /// The unique h with ψ(h) = λ, if it lies in the table.
    std::optional<GroupElement> preimage(const GroupElement& lambda) const;
    MapTable restrict(int rho, const WordMetric& source) const;

    auto operator<=>(const MapTable&) const = default;
};

void to_json(nlohmann::json& j, const MapTable& psi);

using SeedMap = std::function<GroupElement(const GroupElement&)>;

/**
 * Ω_R: distinct restrictions to ball(R) of the translates
 * ψ(h) = φ(g⁻¹k)⁻¹ φ(g⁻¹h) with ℓ(g), ℓ(k) ≤ R_t, so that ψ(k) = e.
 * The slice X_R collects those with ψ(e) = e.
 */
class TruncatedMapSpace {
public:
    TruncatedMapSpace(WordMetric source, WordMetric target, int radius, int translate_radius, double constant,
                      std::vector<MapTable> omega);

    const WordMetric& source() const { return source_; }
    const WordMetric& target() const { return target_; }
    int radius() const { return radius_; }
    int translate_radius() const { return translate_radius_; }
    double constant() const { return constant_; }
    const std::vector<MapTable>& omega() const { return omega_; }
    const std::vector<MapTable>& slice() const { return slice_; }

private:
    WordMetric source_;
    WordMetric target_;
    int radius_;
    int translate_radius_;
    double constant_;
    std::vector<MapTable> omega_;
    std::vector<MapTable> slice_;
};

void to_json(nlohmann::json& j, const TruncatedMapSpace& space);

/// The seed must be defined on ball(max(R, R_t) + R_t); its failures propagate.
TruncatedMapSpace build_omega(const SeedMap& seed, const WordMetric& source, const WordMetric& target, int radius,
                              int translate_radius, double constant);

/// Seed constant: the smallest C for which the seed is C-bi-Lipschitz on ball(radius).
double seed_constant(const SeedMap& seed, int radius, const WordMetric& source, const WordMetric& target);

/// (g·ψ)(h) = ψ(g⁻¹)⁻¹ ψ(g⁻¹h), defined on ball(radius − ℓ(g)).
MapTable gamma_act(const GroupElement& g, const MapTable& psi, const WordMetric& source);
/// (λ·ψ)(h) = λ ψ(ψ⁻¹(λ⁻¹) h), defined on ball(radius − ℓ(ψ⁻¹(λ⁻¹))).
MapTable lambda_act(const GroupElement& lambda, const MapTable& psi, const WordMetric& source);
/// ((g, λ)ψ)(h) = λ ψ(g⁻¹h); differs from gamma_act in general.
MapTable raw_translate(const GroupElement& g, const GroupElement& lambda, const MapTable& psi,
                       const WordMetric& source);

/// α(g, ψ) = ψ(g⁻¹)⁻¹.
GroupElement cocycle_alpha(const GroupElement& g, const MapTable& psi);
/// β(λ, ψ) = (ψ⁻¹(λ⁻¹))⁻¹.
GroupElement cocycle_beta(const GroupElement& lambda, const MapTable& psi);

/**
 * Finite exact table of a Gromov cocycle. α(g, ψ) depends only on ψ
 * restricted to ball(ℓ(g)), and β(λ, ψ) only on ψ restricted to
 * ball(ℓ(ψ⁻¹(λ⁻¹))), so entries are keyed by (group element, ρ, restriction
 * to ball(ρ)).
 */
class CocycleTable {
public:
    enum class Kind { alpha, beta };
    using Key = std::tuple<GroupElement, int, MapTable>;

    CocycleTable(Kind kind, std::string provenance, WordMetric source);

    Kind kind() const { return kind_; }
    const std::string& provenance() const { return provenance_; }
    std::size_t size() const { return entries_.size(); }

    /// Throws TruncationError when the pair is not tabled.
    GroupElement lookup(const GroupElement& g, const MapTable& psi) const;
    /// Overwrites the entry that lookup(g, ψ) reads; for negative controls.
    void set(const GroupElement& g, const MapTable& psi, const GroupElement& value);

    void insert(const GroupElement& g, int rho, MapTable restriction, GroupElement value);
    const std::map<Key, GroupElement>& entries_view() const { return entries_; }

private:
    std::optional<Key> find_key(const GroupElement& g, const MapTable& psi) const;

    Kind kind_;
    std::string provenance_;
    WordMetric source_;
    std::map<Key, GroupElement> entries_;
};

void to_json(nlohmann::json& j, const CocycleTable& t);

/// Points h·ψ for ψ ∈ X_R and ℓ(h) ≤ orbit_radius.
std::vector<MapTable> orbit_points(const TruncatedMapSpace& space, int orbit_radius);

/// α on ball_Γ(element_radius) × orbit_points(orbit_radius).
CocycleTable tabulate_alpha(const TruncatedMapSpace& space, int element_radius, int orbit_radius);
/// β on ball_Λ(element_radius) × orbit_points(orbit_radius), where defined.
CocycleTable tabulate_beta(const TruncatedMapSpace& space, int element_radius, int orbit_radius);

/// (φ = id, α) from Γ acting on the slice to Λ acting on the slice.
Morphism<MapTable> gromov_morphism(const TruncatedMapSpace& space, const CocycleTable& alpha);
/// (φ = id, β), the inverse direction.
Morphism<MapTable> gromov_inverse_morphism(const TruncatedMapSpace& space, const CocycleTable& beta);

/// Every ψ ∈ Ω_R is C-bi-Lipschitz on ball(R) with the seed constant.
Verdict check_omega_bilipschitz(const TruncatedMapSpace& space);

/// α(gh, ψ) = α(g, h·ψ) α(h, ψ) for g, h ∈ ball(W), ψ ∈ X_R, read from the table.
Verdict check_cocycle_identity(const TruncatedMapSpace& space, const CocycleTable& alpha, int window);

/**
 * For every ψ ∈ Ω_R with ψ(k) = e for some k ∈ ball(W): exactly one
 * g ∈ ball(W) moves ψ into the slice under h ↦ ψ(g⁻¹h), and exactly one
 * λ ∈ ball_Λ(⌈C W⌉) does under h ↦ λψ(h). Requires 2W ≤ R.
 */
Verdict check_fundamental_domain(const TruncatedMapSpace& space, int window);

/**
 * {g·x : ℓ(g) ≤ W} equals {λ·x : λ ∈ ball_Λ(⌈C W⌉), ℓ(x⁻¹(λ⁻¹)) ≤ W}, both
 * restricted to ball(R − W), and β(α(g, x), x) = g. Requires 2W ≤ R.
 */
Verdict check_orbit_equality(const TruncatedMapSpace& space, const MapTable& x, int window);

struct FreenessReport {
    bool pass = true;
    std::size_t fixed_in_slice = 0;    // (g ≠ e, ψ) with g·ψ = ψ on ball(R − W)
    std::size_t fixed_in_product = 0;  // (g ≠ e, ψ, y) fixed by the diagonal action
    std::size_t checked = 0;
    std::optional<nlohmann::json> slice_witness;
    std::optional<nlohmann::json> product_witness;
};

void to_json(nlohmann::json& j, const FreenessReport& r);

/**
 * Diagonal action g·(ψ, y) = (g·ψ, (g, α(g, ψ))·y) on X_R × Y with Y an
 * odometer of dimension d_Γ + d_Λ carrying the free Γ × Λ translation
 * action. Counts fixed points with g ∈ ball(W) \ {e} over the sampled y.
 */
FreenessReport force_freeness(const TruncatedMapSpace& space, const OdometerSpace& odometer, int window,
                              const std::vector<DigitPoint>& sample);

} // namespace oelab
