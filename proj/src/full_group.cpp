#include "oelab/full_group.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "oelab/errors.hpp"

namespace oelab {

namespace {

LatticeVector negate(LatticeVector v)
{
    for (auto& x : v)
        x = -x;
    return v;
}

LatticeVector add(const LatticeVector& a, const LatticeVector& b)
{
    LatticeVector out = a;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] += b[i];
    return out;
}

// Replaces any complete set of sibling cylinders by their parent, until none is left.
std::vector<Cylinder> coalesce(const std::vector<Cylinder>& cylinders, const OdometerSpace& space)
{
    std::set<Cylinder> set(cylinders.begin(), cylinders.end());
    for (bool changed = true; changed;) {
        changed = false;
        for (auto it = set.begin(); it != set.end() && !changed; ++it)
            for (int i = 0; i < space.dim() && !changed; ++i) {
                const auto coord = static_cast<std::size_t>(i);
                if (it->prefixes[coord].empty())
                    continue;
                Cylinder parent = *it;
                parent.prefixes[coord].pop_back();
                std::vector<Cylinder> children;
                for (int digit = 0; digit < space.base(i); ++digit) {
                    Cylinder child = parent;
                    child.prefixes[coord].push_back(static_cast<std::uint8_t>(digit));
                    children.push_back(std::move(child));
                }
                if (!std::all_of(children.begin(), children.end(), [&](const auto& c) { return set.count(c); }))
                    continue;
                for (const auto& c : children)
                    set.erase(c);
                set.insert(std::move(parent));
                changed = true;
            }
    }
    return {set.begin(), set.end()};
}

std::vector<Piece> normalize(std::vector<Piece> pieces, const OdometerSpace& space)
{
    std::map<LatticeVector, std::vector<Cylinder>> merged;
    for (auto& p : pieces) {
        auto& bucket = merged[p.label];
        bucket.insert(bucket.end(), p.domain.cylinders().begin(), p.domain.cylinders().end());
    }
    std::vector<Piece> out;
    for (auto& [label, cylinders] : merged)
        if (!cylinders.empty())
            out.push_back(Piece{ClopenSet(coalesce(cylinders, space)), label});
    return out;
}

} // namespace

FullGroupElement FullGroupElement::make(const OdometerSpace& space, std::vector<Piece> pieces)
{
    if (pieces.empty())
        throw PreconditionError("a full-group element needs at least one piece");
    Partition domains;
    Partition images;
    for (const auto& p : pieces) {
        if (p.label.size() != static_cast<std::size_t>(space.dim()))
            throw DimensionMismatch("piece label has wrong dimension");
        validate_clopen(p.domain, space);
        domains.push_back(p.domain);
        images.push_back(translate(p.domain, p.label, space));
    }
    if (!is_partition(domains, space))
        throw PreconditionError("piece domains do not partition X");
    if (!is_partition(images, space))
        throw PreconditionError("piece images do not partition X (map is not bijective)");
    return FullGroupElement(space, normalize(std::move(pieces), space));
}

FullGroupElement FullGroupElement::identity(const OdometerSpace& space)
{
    return translation(space, LatticeVector(static_cast<std::size_t>(space.dim()), 0));
}

FullGroupElement FullGroupElement::translation(const OdometerSpace& space, LatticeVector g)
{
    return make(space, {Piece{ClopenSet::whole(space), std::move(g)}});
}

const LatticeVector& FullGroupElement::label_at(const DigitPoint& x) const
{
    for (const auto& p : pieces_)
        if (p.domain.contains(x))
            return p.label;
    throw PreconditionError("point lies in no piece");
}

DigitPoint FullGroupElement::apply(const DigitPoint& x) const { return odometer_add(x, label_at(x), space_); }

void to_json(nlohmann::json& j, const FullGroupElement& t)
{
    j = nlohmann::json::array();
    for (const auto& p : t.pieces())
        for (const auto& c : p.domain.cylinders())
            j.push_back({{"cylinder", c}, {"label", p.label}});
}

FullGroupElement compose(const FullGroupElement& t, const FullGroupElement& u)
{
    if (!(t.space() == u.space()))
        throw PreconditionError("compose: elements act on different spaces");
    const auto& space = t.space();
    std::vector<Piece> pieces;
    for (const auto& a : u.pieces()) {
        for (const auto& b : t.pieces()) {
            // points of A whose U-image lands in B
            auto domain = intersect(a.domain, translate(b.domain, negate(a.label), space));
            if (domain.empty())
                continue;
            if (domain.max_prefix_length() > static_cast<std::size_t>(space.depth()))
                throw TruncationError("composition needs cylinders deeper than the truncation depth");
            pieces.push_back(Piece{std::move(domain), add(a.label, b.label)});
        }
    }
    return FullGroupElement::make(space, std::move(pieces));
}

FullGroupElement invert(const FullGroupElement& t)
{
    std::vector<Piece> pieces;
    for (const auto& p : t.pieces())
        pieces.push_back(Piece{translate(p.domain, p.label, t.space()), negate(p.label)});
    return FullGroupElement::make(t.space(), std::move(pieces));
}

bool equal_pointwise(const FullGroupElement& a, const FullGroupElement& b)
{
    if (!(a.space() == b.space()))
        return false;
    const auto n = a.space().point_count();
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto x = point_from_index(i, a.space());
        if (a.apply(x) != b.apply(x))
            return false;
    }
    return true;
}

bool preserves_measure(const FullGroupElement& t)
{
    std::vector<Rational> before;
    std::vector<Rational> after;
    for (const auto& p : t.pieces()) {
        before.push_back(haar_measure(p.domain, t.space()));
        after.push_back(haar_measure(translate(p.domain, p.label, t.space()), t.space()));
    }
    std::sort(before.begin(), before.end());
    std::sort(after.begin(), after.end());
    return before == after;
}

Verdict check_spatial_realization(const LatticeVector& g, const FullGroupElement& t,
                                  const FullGroupElement& conjugate)
{
    Verdict v("translation by g realizes ad(g)");
    const auto& space = t.space();
    const auto n = space.point_count();
    for (std::uint64_t i = 0; i < n && !v.saturated(); ++i) {
        const auto x = point_from_index(i, space);
        const auto lhs = conjugate.apply(odometer_add(x, g, space));
        const auto rhs = odometer_add(t.apply(x), g, space);
        if (lhs != rhs)
            v.fail({{"x", x}, {"g", g}, {"conjugate_image", lhs}, {"translated_image", rhs}});
    }
    v.info["points"] = n;
    return v;
}

Verdict ad_realization_check(const LatticeVector& g, const std::vector<FullGroupElement>& sample,
                             const OdometerSpace& space)
{
    Verdict v("translation by g realizes ad(g)");
    const auto tg = FullGroupElement::translation(space, g);
    const auto tg_inv = FullGroupElement::translation(space, negate(g));
    for (std::size_t k = 0; k < sample.size(); ++k) {
        const auto conjugate = compose(tg, compose(sample[k], tg_inv));
        auto one = check_spatial_realization(g, sample[k], conjugate);
        for (auto& w : one.witnesses) {
            w["sample"] = k;
            v.fail(std::move(w));
        }
    }
    v.info = {{"g", g}, {"samples", sample.size()}, {"points", space.point_count()}};
    return v;
}

Partition random_cylinder_partition(const OdometerSpace& space, std::mt19937_64& rng, int max_depth)
{
    if (max_depth < 0 || max_depth > space.depth())
        max_depth = space.depth();
    std::vector<Cylinder> open{whole_cylinder(space)};
    std::vector<Cylinder> done;
    std::bernoulli_distribution split(0.55);
    while (!open.empty()) {
        auto c = std::move(open.back());
        open.pop_back();
        std::vector<int> splittable;
        for (int i = 0; i < space.dim(); ++i)
            if (c.prefixes[static_cast<std::size_t>(i)].size() < static_cast<std::size_t>(max_depth))
                splittable.push_back(i);
        if (splittable.empty() || !split(rng)) {
            done.push_back(std::move(c));
            continue;
        }
        std::uniform_int_distribution<std::size_t> pick(0, splittable.size() - 1);
        const int i = splittable[pick(rng)];
        for (int digit = 0; digit < space.base(i); ++digit) {
            auto child = c;
            child.prefixes[static_cast<std::size_t>(i)].push_back(static_cast<std::uint8_t>(digit));
            open.push_back(std::move(child));
        }
    }
    Partition out;
    for (auto& c : done)
        out.push_back(ClopenSet({std::move(c)}));
    std::sort(out.begin(), out.end());
    return out;
}

FullGroupElement random_element(const OdometerSpace& space, std::mt19937_64& rng, int factors, int max_depth,
                                std::int64_t max_label)
{
    if (max_depth < 0 || max_depth > space.depth())
        max_depth = space.depth();
    std::uniform_int_distribution<std::int64_t> label(-max_label, max_label);
    std::uniform_int_distribution<int> depth(1, std::max(1, max_depth));
    std::bernoulli_distribution use_translation(0.25);
    auto result = FullGroupElement::identity(space);
    for (int f = 0; f < factors; ++f) {
        LatticeVector g(static_cast<std::size_t>(space.dim()));
        if (use_translation(rng)) {
            for (auto& x : g)
                x = label(rng);
            result = compose(FullGroupElement::translation(space, g), result);
            continue;
        }
        Cylinder c = whole_cylinder(space);
        for (int i = 0; i < space.dim(); ++i) {
            std::uniform_int_distribution<int> digit(0, space.base(i) - 1);
            const int k = depth(rng);
            for (int j = 0; j < k; ++j)
                c.prefixes[static_cast<std::size_t>(i)].push_back(static_cast<std::uint8_t>(digit(rng)));
        }
        bool found = false;
        for (int attempt = 0; attempt < 32 && !found; ++attempt) {
            for (auto& x : g)
                x = label(rng);
            found = disjoint(c, translate(c, g, space));
        }
        if (!found)
            continue;
        const ClopenSet a({c});
        const ClopenSet b({translate(c, g, space)});
        std::vector<Piece> pieces{{a, g}, {b, negate(g)}};
        auto rest = complement(disjoint_union(a, b), space);
        if (!rest.empty())
            pieces.push_back(Piece{std::move(rest), LatticeVector(static_cast<std::size_t>(space.dim()), 0)});
        result = compose(FullGroupElement::make(space, std::move(pieces)), result);
    }
    return result;
}

} // namespace oelab
