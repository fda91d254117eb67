#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace oelab {

using LatticeVector = std::vector<std::int64_t>;

enum class GroupKind { lattice, free };

/**
 * An element of Z^d or of the free group F_k.
 *
 * Lattice elements hold d integer coordinates. Free-group elements hold a
 * reduced word of signed generator indices: +i is the i-th generator, -i its
 * inverse (1-based). Words are reduced on construction, so equality is plain
 * comparison of the stored data.
 */
class GroupElement {
public:
    GroupElement() = default;

    static GroupElement lattice(LatticeVector coords);
    static GroupElement word(int rank, std::vector<std::int64_t> letters);
    /// "abA" style: letter 'a'+i is generator i+1, uppercase is the inverse.
    static GroupElement parse_word(int rank, std::string_view text);

    GroupKind kind() const { return kind_; }
    /// Lattice dimension or free rank.
    int rank() const { return rank_; }
    const std::vector<std::int64_t>& data() const { return data_; }
    const LatticeVector& coords() const;

    bool is_identity() const;
    std::string to_string() const;

    auto operator<=>(const GroupElement&) const = default;

private:
    GroupKind kind_ = GroupKind::lattice;
    int rank_ = 0;
    std::vector<std::int64_t> data_;
};

GroupElement multiply(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& a);

inline GroupElement operator*(const GroupElement& a, const GroupElement& b) { return multiply(a, b); }

void to_json(nlohmann::json& j, const GroupElement& g);

/// A lattice Z^d or a free group F_k; the instance an element belongs to.
struct Group {
    GroupKind kind = GroupKind::lattice;
    int rank = 1;

    static Group lattice(int d);
    static Group free(int k);

    GroupElement identity() const;
    bool contains(const GroupElement& g) const { return g.kind() == kind && g.rank() == rank; }
    /// ±e_i for lattices, a^±1, b^±1, ... for free groups.
    std::vector<GroupElement> standard_generators() const;

    bool operator==(const Group&) const = default;
};

/**
 * Finite symmetric generating set without the identity.
 *
 * Generation is only verified at ball scale: every standard generator must
 * be reachable within `check_radius` steps.
 */
class GeneratingSet {
public:
    GeneratingSet(Group group, std::vector<GroupElement> elements, int check_radius = 32);
    static GeneratingSet standard(Group group);

    const Group& group() const { return group_; }
    const std::vector<GroupElement>& elements() const { return elements_; }
    bool is_standard() const { return standard_; }

private:
    Group group_;
    std::vector<GroupElement> elements_;
    bool standard_ = false;
};

struct BallLayer;

/**
 * Word metric of a group with respect to a generating set.
 *
 * Lengths are exact minimal factorization lengths found by breadth-first
 * search over the Cayley graph. Explored layers are memoized per instance
 * (internally synchronized). For the standard generating sets `length`
 * short-circuits to the L1 norm or the reduced word length; `bfs_length`
 * always searches.
 */
class WordMetric {
public:
    static constexpr int default_budget = 32;

    explicit WordMetric(GeneratingSet generators, int budget = default_budget);
    static WordMetric standard(Group group, int budget = default_budget);

    const Group& group() const { return generators_.group(); }
    const GeneratingSet& generators() const { return generators_; }
    int budget() const { return budget_; }

    /// Throws BudgetExceeded when g lies outside the ball of radius `budget`.
    int bfs_length(const GroupElement& g) const;
    int length(const GroupElement& g) const;
    int distance(const GroupElement& g, const GroupElement& h) const;

    /// {g : length(g) <= radius}, sorted lexicographically.
    const std::vector<GroupElement>& ball(int radius) const;

private:
    void explore_to(int radius) const;

    GeneratingSet generators_;
    int budget_;

    struct Cache {
        std::mutex mutex;
        std::map<GroupElement, int> distance;
        std::vector<std::vector<GroupElement>> layers;
        std::map<int, std::vector<GroupElement>> balls;
    };
    std::shared_ptr<Cache> cache_;
};

/// Result of a two-sided Lipschitz sweep over all pairs of a ball.
struct BiLipschitzReport {
    bool pass = true;
    double constant = 0.0;      // the constant that was tested
    double min_ratio = 0.0;     // min d_target / d_source over distinct pairs
    double max_ratio = 0.0;     // max d_target / d_source
    double required = 0.0;      // smallest C for which both inequalities hold
    std::optional<std::pair<GroupElement, GroupElement>> witness;
    std::size_t pairs = 0;
};

void to_json(nlohmann::json& j, const BiLipschitzReport& r);

/**
 * Checks C^{-1} d(g,h) <= d'(f(g), f(h)) <= C d(g,h) for all g != h in the
 * source ball of the given radius. Exceptions thrown by f (undefined points)
 * propagate.
 */
BiLipschitzReport is_bilipschitz_on_ball(const std::function<GroupElement(const GroupElement&)>& f, int radius,
                                         double constant, const WordMetric& source, const WordMetric& target);

/// Same sweep over explicit points and their images.
BiLipschitzReport bilipschitz_sweep(std::span<const GroupElement> points, std::span<const GroupElement> images,
                                    double constant, const WordMetric& source, const WordMetric& target);

} // namespace oelab
