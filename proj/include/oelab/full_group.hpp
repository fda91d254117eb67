#pragma once

#include <random>
#include <vector>

#include "oelab/odometer.hpp"

namespace oelab {

/// One piece T|_A = translation by `label` on A.
struct Piece {
    ClopenSet domain;
    LatticeVector label;

    auto operator<=>(const Piece&) const = default;
};

/**
 * An element of the topological full group [[X, Z^d]] of a product odometer:
 * a clopen partition {A_i} with labels g_i such that {g_i A_i} is again a
 * partition.
 *
 * Pieces with equal labels are merged, complete sets of sibling cylinders are
 * replaced by their parent and pieces are sorted by label, so equal maps given
 * by cylinder data of the same shape compare equal.
 */
class FullGroupElement {
public:
    /// Throws PreconditionError when the domains or the images fail to partition X.
    static FullGroupElement make(const OdometerSpace& space, std::vector<Piece> pieces);
    static FullGroupElement identity(const OdometerSpace& space);
    static FullGroupElement translation(const OdometerSpace& space, LatticeVector g);

    const OdometerSpace& space() const { return space_; }
    const std::vector<Piece>& pieces() const { return pieces_; }

    DigitPoint apply(const DigitPoint& x) const;
    /// The label used at x, i.e. the Z^d element moving x to apply(x).
    const LatticeVector& label_at(const DigitPoint& x) const;

    bool operator==(const FullGroupElement& other) const { return pieces_ == other.pieces_; }

private:
    FullGroupElement(OdometerSpace space, std::vector<Piece> pieces)
        : space_(std::move(space)), pieces_(std::move(pieces))
    {
    }

    OdometerSpace space_;
    std::vector<Piece> pieces_;
};

void to_json(nlohmann::json& j, const FullGroupElement& t);

/// T ∘ U: first U, then T.
FullGroupElement compose(const FullGroupElement& t, const FullGroupElement& u);
FullGroupElement invert(const FullGroupElement& t);

/// Pointwise equality on all depth-N points.
bool equal_pointwise(const FullGroupElement& a, const FullGroupElement& b);

/// Image partition {g_i A_i} has the same multiset of measures as {A_i}.
bool preserves_measure(const FullGroupElement& t);

/**
 * Checks that `conjugate` is spatially realized by translation by g:
 * conjugate(g + x) = g + T(x) for every depth-N point x.
 */
Verdict check_spatial_realization(const LatticeVector& g, const FullGroupElement& t,
                                  const FullGroupElement& conjugate);

/// Forms ad(g)(T) = g T g^{-1} for each sample and checks that translation by g realizes it.
Verdict ad_realization_check(const LatticeVector& g, const std::vector<FullGroupElement>& sample,
                             const OdometerSpace& space);

/// Random cylinder partition of X obtained by splitting prefixes up to `max_depth`.
Partition random_cylinder_partition(const OdometerSpace& space, std::mt19937_64& rng, int max_depth);

/**
 * Random element built as a product of translations and involutions that
 * swap a cylinder C with a disjoint translate C + g.
 */
FullGroupElement random_element(const OdometerSpace& space, std::mt19937_64& rng, int factors = 4,
                                int max_depth = -1, std::int64_t max_label = 3);

} // namespace oelab
