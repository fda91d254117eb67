#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"
#include "oelab/group.hpp"
#include "oelab/linalg.hpp"
#include "oelab/verdict.hpp"

namespace oelab {

using Rational = boost::multiprecision::cpp_rational;

std::string to_string(const Rational& q);

using Digits = std::vector<std::uint8_t>;

/// Product odometer prod_i Z_{p_i}, truncated at depth N.
class OdometerSpace {
public:
    OdometerSpace(std::vector<int> bases, int depth);
    static OdometerSpace uniform(int dim, int base, int depth) { return {std::vector<int>(dim, base), depth}; }

    int dim() const { return static_cast<int>(bases_.size()); }
    int depth() const { return depth_; }
    int base(int i) const { return bases_.at(static_cast<std::size_t>(i)); }
    const std::vector<int>& bases() const { return bases_; }
    bool single_base() const;

    /// p_i^k; throws BudgetExceeded past 2^62.
    std::uint64_t modulus(int i, int k) const;
    std::uint64_t modulus(int i) const { return modulus(i, depth_); }
    /// Number of depth-N points; throws BudgetExceeded past `limit`.
    std::uint64_t point_count(std::uint64_t limit = 1ull << 24) const;

    bool operator==(const OdometerSpace&) const = default;

private:
    std::vector<int> bases_;
    int depth_;
};

/// A depth-N truncated point: one digit string per coordinate, least significant digit first.
struct DigitPoint {
    std::vector<Digits> digits;

    auto operator<=>(const DigitPoint&) const = default;
};

void to_json(nlohmann::json& j, const DigitPoint& x);
std::string digits_to_string(const Digits& d);
Digits digits_from_string(const std::string& s);

DigitPoint zero_point(const OdometerSpace& space);
DigitPoint point_from_values(std::span<const std::uint64_t> values, const OdometerSpace& space);
std::vector<std::uint64_t> point_values(const DigitPoint& x, const OdometerSpace& space);
/// Mixed-radix enumeration index over all depth-N points.
DigitPoint point_from_index(std::uint64_t index, const OdometerSpace& space);
std::uint64_t point_index(const DigitPoint& x, const OdometerSpace& space);
void validate_point(const DigitPoint& x, const OdometerSpace& space);

/// Adds a signed integer to a little-endian digit string in base p, with carry, wrapping mod p^len.
void add_in_place(Digits& digits, std::int64_t v, int p);

/// Coordinatewise x_i + v_i mod p_i^N, carried digit by digit.
DigitPoint odometer_add(const DigitPoint& x, std::span<const std::int64_t> v, const OdometerSpace& space);

/// Product of per-coordinate digit prefixes; an empty prefix leaves that coordinate free.
struct Cylinder {
    std::vector<Digits> prefixes;

    bool contains(const DigitPoint& x) const;
    auto operator<=>(const Cylinder&) const = default;
};

void to_json(nlohmann::json& j, const Cylinder& c);

Cylinder whole_cylinder(const OdometerSpace& space);
std::optional<Cylinder> intersect(const Cylinder& a, const Cylinder& b);
bool disjoint(const Cylinder& a, const Cylinder& b);
/// Image of a cylinder under translation by v; exact because addition mod p^k only sees k digits.
Cylinder translate(const Cylinder& c, std::span<const std::int64_t> v, const OdometerSpace& space);
/// The depth-k cylinder containing x.
Cylinder cylinder_of(const DigitPoint& x, int k);

/// Finite disjoint union of cylinders, kept sorted.
class ClopenSet {
public:
    ClopenSet() = default;
    /// Throws PreconditionError when two cylinders overlap.
    explicit ClopenSet(std::vector<Cylinder> cylinders);
    static ClopenSet whole(const OdometerSpace& space);

    const std::vector<Cylinder>& cylinders() const { return cylinders_; }
    bool empty() const { return cylinders_.empty(); }
    bool contains(const DigitPoint& x) const;
    std::size_t max_prefix_length() const;

    auto operator<=>(const ClopenSet&) const = default;

private:
    std::vector<Cylinder> cylinders_;
};

void to_json(nlohmann::json& j, const ClopenSet& u);

ClopenSet intersect(const ClopenSet& a, const ClopenSet& b);
/// Union of two disjoint clopen sets.
ClopenSet disjoint_union(const ClopenSet& a, const ClopenSet& b);
ClopenSet translate(const ClopenSet& u, std::span<const std::int64_t> v, const OdometerSpace& space);
bool intersects(const ClopenSet& a, const ClopenSet& b);
/// X \ U as a disjoint union of cylinders.
ClopenSet complement(const ClopenSet& u, const OdometerSpace& space);
void validate_clopen(const ClopenSet& u, const OdometerSpace& space);

Rational haar_measure(const Cylinder& c, const OdometerSpace& space);
Rational haar_measure(const ClopenSet& u, const OdometerSpace& space);

using Partition = std::vector<ClopenSet>;

/// True when the pieces are pairwise disjoint and their measures sum to 1.
bool is_partition(const Partition& pieces, const OdometerSpace& space);

/// Coarsest common refinement; throws PreconditionError when an input is not a partition.
Partition refine_common(const std::vector<Partition>& partitions, const OdometerSpace& space);

/// A·value(x) mod p^N, coordinatewise. Requires a single base and det A = ±1.
DigitPoint matrix_act(const IntMatrix& A, const DigitPoint& x, const OdometerSpace& space);
void require_unimodular_action(const IntMatrix& A, const OdometerSpace& space);

/// Verifies x ↦ A x permutes all depth-N points (at most 2^20 of them).
Verdict bijectivity_check_depthN(const IntMatrix& A, const OdometerSpace& space);

/// The Z^d-orbit of the zero point visits every depth-k cylinder.
Verdict minimality_witness(const OdometerSpace& space, int k);

struct WanderingReport {
    int radius = 0;
    std::optional<LatticeVector> witness;  // g != e with gU ∩ U ≠ ∅
    std::size_t searched = 0;
};

void to_json(nlohmann::json& j, const WanderingReport& r);

/// Searches g in ball(R) \ {e} (standard generators, shortest first) with gU ∩ U ≠ ∅.
WanderingReport wandering_check(const ClopenSet& u, int radius, const OdometerSpace& space);

} // namespace oelab
