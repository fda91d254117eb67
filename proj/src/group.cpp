#include "oelab/group.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <limits>

#include "oelab/errors.hpp"

namespace oelab {

namespace {

void reduce_word(std::vector<std::int64_t>& letters)
{
    std::vector<std::int64_t> out;
    out.reserve(letters.size());
    for (auto s : letters) {
        if (!out.empty() && out.back() == -s)
            out.pop_back();
        else
            out.push_back(s);
    }
    letters = std::move(out);
}

void require_same_group(const GroupElement& a, const GroupElement& b)
{
    if (a.kind() != b.kind() || a.rank() != b.rank())
        throw DimensionMismatch("group elements belong to different groups: " + a.to_string() + " vs " +
                                b.to_string());
}

} // namespace

GroupElement GroupElement::lattice(LatticeVector coords)
{
    if (coords.empty())
        throw PreconditionError("lattice dimension must be at least 1");
    GroupElement g;
    g.kind_ = GroupKind::lattice;
    g.rank_ = static_cast<int>(coords.size());
    g.data_ = std::move(coords);
    return g;
}

GroupElement GroupElement::word(int rank, std::vector<std::int64_t> letters)
{
    if (rank < 1)
        throw PreconditionError("free rank must be at least 1");
    for (auto s : letters)
        if (s == 0 || std::llabs(s) > rank)
            throw PreconditionError("generator index out of range for F_" + std::to_string(rank));
    reduce_word(letters);
    GroupElement g;
    g.kind_ = GroupKind::free;
    g.rank_ = rank;
    g.data_ = std::move(letters);
    return g;
}

GroupElement GroupElement::parse_word(int rank, std::string_view text)
{
    std::vector<std::int64_t> letters;
    for (char c : text) {
        if (std::islower(static_cast<unsigned char>(c)))
            letters.push_back(c - 'a' + 1);
        else if (std::isupper(static_cast<unsigned char>(c)))
            letters.push_back(-(c - 'A' + 1));
        else
            throw PreconditionError(std::string("bad generator symbol '") + c + "'");
    }
    return word(rank, std::move(letters));
}

const LatticeVector& GroupElement::coords() const
{
    if (kind_ != GroupKind::lattice)
        throw PreconditionError("coords() called on a free-group element");
    return data_;
}

bool GroupElement::is_identity() const
{
    if (kind_ == GroupKind::free)
        return data_.empty();
    return std::all_of(data_.begin(), data_.end(), [](auto x) { return x == 0; });
}

std::string GroupElement::to_string() const
{
    if (kind_ == GroupKind::free) {
        std::string s;
        for (auto l : data_)
            s += l > 0 ? static_cast<char>('a' + l - 1) : static_cast<char>('A' - l - 1);
        return s;
    }
    std::string s = "(";
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (i)
            s += ",";
        s += std::to_string(data_[i]);
    }
    return s + ")";
}

GroupElement multiply(const GroupElement& a, const GroupElement& b)
{
    require_same_group(a, b);
    if (a.kind() == GroupKind::lattice) {
        LatticeVector v = a.data();
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] += b.data()[i];
        return GroupElement::lattice(std::move(v));
    }
    std::vector<std::int64_t> letters = a.data();
    letters.insert(letters.end(), b.data().begin(), b.data().end());
    return GroupElement::word(a.rank(), std::move(letters));
}

GroupElement inverse(const GroupElement& a)
{
    if (a.kind() == GroupKind::lattice) {
        LatticeVector v = a.data();
        for (auto& x : v)
            x = -x;
        return GroupElement::lattice(std::move(v));
    }
    std::vector<std::int64_t> letters(a.data().rbegin(), a.data().rend());
    for (auto& l : letters)
        l = -l;
    return GroupElement::word(a.rank(), std::move(letters));
}

void to_json(nlohmann::json& j, const GroupElement& g)
{
    if (g.kind() == GroupKind::lattice)
        j = g.data();
    else
        j = g.to_string();
}

Group Group::lattice(int d)
{
    if (d < 1)
        throw PreconditionError("lattice dimension must be at least 1");
    return Group{GroupKind::lattice, d};
}

Group Group::free(int k)
{
    if (k < 1 || k > 26)
        throw PreconditionError("free rank must be in [1, 26]");
    return Group{GroupKind::free, k};
}

GroupElement Group::identity() const
{
    if (kind == GroupKind::lattice)
        return GroupElement::lattice(LatticeVector(static_cast<std::size_t>(rank), 0));
    return GroupElement::word(rank, {});
}

std::vector<GroupElement> Group::standard_generators() const
{
    std::vector<GroupElement> gens;
    for (int i = 0; i < rank; ++i) {
        for (int sign : {1, -1}) {
            if (kind == GroupKind::lattice) {
                LatticeVector v(static_cast<std::size_t>(rank), 0);
                v[static_cast<std::size_t>(i)] = sign;
                gens.push_back(GroupElement::lattice(std::move(v)));
            } else {
                gens.push_back(GroupElement::word(rank, {sign * (i + 1)}));
            }
        }
    }
    return gens;
}

GeneratingSet::GeneratingSet(Group group, std::vector<GroupElement> elements, int check_radius)
    : group_(group), elements_(std::move(elements))
{
    if (elements_.empty())
        throw PreconditionError("generating set is empty");
    for (const auto& s : elements_) {
        if (!group_.contains(s))
            throw DimensionMismatch("generator " + s.to_string() + " is not in the group");
        if (s.is_identity())
            throw PreconditionError("generating set contains the identity");
        if (std::find(elements_.begin(), elements_.end(), inverse(s)) == elements_.end())
            throw PreconditionError("generating set is not symmetric: missing inverse of " + s.to_string());
    }
    std::sort(elements_.begin(), elements_.end());
    elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());

    auto standard = group_.standard_generators();
    std::sort(standard.begin(), standard.end());
    standard_ = standard == elements_;
    if (standard_)
        return;

    // Generation check at ball scale: every standard generator must be reachable.
    WordMetric probe(GeneratingSet(*this), check_radius);
    for (const auto& e : group_.standard_generators()) {
        try {
            probe.bfs_length(e);
        } catch (const BudgetExceeded&) {
            throw PreconditionError("generating set does not reach " + e.to_string() + " within radius " +
                                    std::to_string(check_radius));
        }
    }
}

GeneratingSet GeneratingSet::standard(Group group) { return GeneratingSet(group, group.standard_generators()); }

WordMetric::WordMetric(GeneratingSet generators, int budget)
    : generators_(std::move(generators)), budget_(budget), cache_(std::make_shared<Cache>())
{
    if (budget_ < 0)
        throw PreconditionError("search budget must be non-negative");
    auto e = generators_.group().identity();
    cache_->distance.emplace(e, 0);
    cache_->layers.push_back({e});
}

WordMetric WordMetric::standard(Group group, int budget) { return WordMetric(GeneratingSet::standard(group), budget); }

void WordMetric::explore_to(int radius) const
{
    // caller holds the mutex
    auto& c = *cache_;
    while (static_cast<int>(c.layers.size()) <= radius) {
        const auto& frontier = c.layers.back();
        int next_distance = static_cast<int>(c.layers.size());
        std::vector<GroupElement> next;
        for (const auto& g : frontier) {
            for (const auto& s : generators_.elements()) {
                auto h = multiply(g, s);
                if (c.distance.emplace(h, next_distance).second)
                    next.push_back(std::move(h));
            }
        }
        std::sort(next.begin(), next.end());
        c.layers.push_back(std::move(next));
    }
}

int WordMetric::bfs_length(const GroupElement& g) const
{
    if (!group().contains(g))
        throw DimensionMismatch("element " + g.to_string() + " is not in the metric's group");
    std::lock_guard lock(cache_->mutex);
    for (;;) {
        if (auto it = cache_->distance.find(g); it != cache_->distance.end())
            return it->second;
        int explored = static_cast<int>(cache_->layers.size()) - 1;
        if (explored >= budget_)
            throw BudgetExceeded("element " + g.to_string() + " lies outside the search radius " +
                                 std::to_string(budget_));
        explore_to(explored + 1);
    }
}

int WordMetric::length(const GroupElement& g) const
{
    if (!generators_.is_standard())
        return bfs_length(g);
    if (!group().contains(g))
        throw DimensionMismatch("element " + g.to_string() + " is not in the metric's group");
    if (g.kind() == GroupKind::free)
        return static_cast<int>(g.data().size());
    std::int64_t sum = 0;
    for (auto x : g.data())
        sum += std::llabs(x);
    if (sum > std::numeric_limits<int>::max())
        throw BudgetExceeded("word length overflows int");
    return static_cast<int>(sum);
}

int WordMetric::distance(const GroupElement& g, const GroupElement& h) const { return length(inverse(g) * h); }

const std::vector<GroupElement>& WordMetric::ball(int radius) const
{
    if (radius < 0)
        throw PreconditionError("ball radius must be non-negative");
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->balls.find(radius); it != cache_->balls.end())
        return it->second;
    explore_to(radius);
    std::vector<GroupElement> all;
    for (int r = 0; r <= radius; ++r)
        all.insert(all.end(), cache_->layers[static_cast<std::size_t>(r)].begin(),
                   cache_->layers[static_cast<std::size_t>(r)].end());
    std::sort(all.begin(), all.end());
    return cache_->balls.emplace(radius, std::move(all)).first->second;
}

void to_json(nlohmann::json& j, const BiLipschitzReport& r)
{
    j = nlohmann::json{{"pass", r.pass},           {"constant", r.constant}, {"min_ratio", r.min_ratio},
                       {"max_ratio", r.max_ratio}, {"required", r.required}, {"pairs", r.pairs}};
    if (r.witness)
        j["witness"] = nlohmann::json::array({r.witness->first, r.witness->second});
}

BiLipschitzReport bilipschitz_sweep(std::span<const GroupElement> points, std::span<const GroupElement> images,
                                    double constant, const WordMetric& source, const WordMetric& target)
{
    if (points.size() != images.size())
        throw PreconditionError("points and images differ in length");
    BiLipschitzReport report;
    report.constant = constant;
    report.min_ratio = std::numeric_limits<double>::infinity();
    double worst_inverse = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const int ds = source.distance(points[i], points[j]);
            const int dt = target.distance(images[i], images[j]);
            ++report.pairs;
            if (ds == 0)
                continue;
            // Compare by correctly rounded ratios so that the empirical
            // constant itself always passes.
            const double up = static_cast<double>(dt) / ds;
            const double down = dt == 0 ? std::numeric_limits<double>::infinity() : static_cast<double>(ds) / dt;
            report.min_ratio = std::min(report.min_ratio, up);
            report.max_ratio = std::max(report.max_ratio, up);
            worst_inverse = std::max(worst_inverse, down);
            if ((up > constant || down > constant) && !report.witness) {
                report.pass = false;
                report.witness = std::make_pair(points[i], points[j]);
            }
        }
    }
    if (report.pairs == 0 || report.min_ratio == std::numeric_limits<double>::infinity()) {
        report.min_ratio = report.max_ratio = 1.0;
        worst_inverse = 1.0;
    }
    report.required = std::max(report.max_ratio, worst_inverse);
    return report;
}

BiLipschitzReport is_bilipschitz_on_ball(const std::function<GroupElement(const GroupElement&)>& f, int radius,
                                         double constant, const WordMetric& source, const WordMetric& target)
{
    const auto& points = source.ball(radius);
    std::vector<GroupElement> images;
    images.reserve(points.size());
    for (const auto& g : points) {
        auto image = f(g);
        if (!target.group().contains(image))
            throw DimensionMismatch("map value " + image.to_string() + " is not in the target group");
        images.push_back(std::move(image));
    }
    return bilipschitz_sweep(points, images, constant, source, target);
}

} // namespace oelab
