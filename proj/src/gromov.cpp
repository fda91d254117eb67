#include "oelab/gromov.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "oelab/errors.hpp"

namespace oelab {

const GroupElement& MapTable::at(const GroupElement& h) const
{
    auto it = values.find(h);
    if (it == values.end())
        throw TruncationError("map table of radius " + std::to_string(radius) + " has no value at " +
                              h.to_string());
    return it->second;
}

std::optional<GroupElement> MapTable::preimage(const GroupElement& lambda) const
{
    for (const auto& [h, value] : values)
        if (value == lambda)
            return h;
    return std::nullopt;
}

MapTable MapTable::restrict(int rho, const WordMetric& source) const
{
    if (rho > radius)
        throw TruncationError("cannot restrict a radius-" + std::to_string(radius) + " table to radius " +
                              std::to_string(rho));
    MapTable out;
    out.radius = rho;
    for (const auto& h : source.ball(rho))
        out.values.emplace(h, at(h));
    return out;
}

void to_json(nlohmann::json& j, const MapTable& psi)
{
    auto values = nlohmann::json::array();
    for (const auto& [h, value] : psi.values)
        values.push_back({h, value});
    j = {{"R", psi.radius}, {"values", values}};
}

TruncatedMapSpace::TruncatedMapSpace(WordMetric source, WordMetric target, int radius, int translate_radius,
                                     double constant, std::vector<MapTable> omega)
    : source_(std::move(source)),
      target_(std::move(target)),
      radius_(radius),
      translate_radius_(translate_radius),
      constant_(constant),
      omega_(std::move(omega))
{
    const auto e = source_.group().identity();
    const auto e_target = target_.group().identity();
    for (const auto& psi : omega_) {
        if (psi.radius != radius_)
            throw PreconditionError("every map in Ω must be defined on ball(R)");
        if (psi.at(e) == e_target)
            slice_.push_back(psi);
    }
    if (slice_.empty())
        throw PreconditionError("the slice X_R is empty");
}

void to_json(nlohmann::json& j, const TruncatedMapSpace& space)
{
    j = {{"R", space.radius()},
         {"R_t", space.translate_radius()},
         {"C", space.constant()},
         {"omega_size", space.omega().size()},
         {"slice_size", space.slice().size()}};
}

TruncatedMapSpace build_omega(const SeedMap& seed, const WordMetric& source, const WordMetric& target, int radius,
                              int translate_radius, double constant)
{
    if (radius < 0 || translate_radius < 0)
        throw PreconditionError("radii must be non-negative");
    std::map<GroupElement, GroupElement> cache;
    auto phi = [&](const GroupElement& h) -> const GroupElement& {
        auto it = cache.find(h);
        if (it == cache.end())
            it = cache.emplace(h, seed(h)).first;
        return it->second;
    };
    const auto& translates = source.ball(translate_radius);
    const auto& domain = source.ball(radius);
    std::set<MapTable> omega;
    for (const auto& g : translates) {
        const auto gi = inverse(g);
        for (const auto& k : translates) {
            const auto base = inverse(phi(gi * k));
            MapTable psi;
            psi.radius = radius;
            for (const auto& h : domain)
                psi.values.emplace(h, base * phi(gi * h));
            omega.insert(std::move(psi));
        }
    }
    return TruncatedMapSpace(source, target, radius, translate_radius, constant,
                             std::vector<MapTable>(omega.begin(), omega.end()));
}

double seed_constant(const SeedMap& seed, int radius, const WordMetric& source, const WordMetric& target)
{
    return is_bilipschitz_on_ball(seed, radius, std::numeric_limits<double>::max(), source, target).required;
}

MapTable gamma_act(const GroupElement& g, const MapTable& psi, const WordMetric& source)
{
    const int r = source.length(g);
    if (r > psi.radius)
        throw TruncationError("gamma_act: ℓ(g) exceeds the table radius");
    const auto gi = inverse(g);
    const auto base = inverse(psi.at(gi));
    MapTable out;
    out.radius = psi.radius - r;
    for (const auto& h : source.ball(out.radius))
        out.values.emplace(h, base * psi.at(gi * h));
    return out;
}

MapTable lambda_act(const GroupElement& lambda, const MapTable& psi, const WordMetric& source)
{
    const auto k = psi.preimage(inverse(lambda));
    if (!k)
        throw TruncationError("lambda_act: λ⁻¹ = " + inverse(lambda).to_string() + " is not in the image");
    MapTable out;
    out.radius = psi.radius - source.length(*k);
    for (const auto& h : source.ball(out.radius))
        out.values.emplace(h, lambda * psi.at(*k * h));
    return out;
}

MapTable raw_translate(const GroupElement& g, const GroupElement& lambda, const MapTable& psi,
                       const WordMetric& source)
{
    const int r = source.length(g);
    if (r > psi.radius)
        throw TruncationError("raw_translate: ℓ(g) exceeds the table radius");
    const auto gi = inverse(g);
    MapTable out;
    out.radius = psi.radius - r;
    for (const auto& h : source.ball(out.radius))
        out.values.emplace(h, lambda * psi.at(gi * h));
    return out;
}

GroupElement cocycle_alpha(const GroupElement& g, const MapTable& psi) { return inverse(psi.at(inverse(g))); }

GroupElement cocycle_beta(const GroupElement& lambda, const MapTable& psi)
{
    const auto k = psi.preimage(inverse(lambda));
    if (!k)
        throw TruncationError("cocycle_beta: λ⁻¹ = " + inverse(lambda).to_string() + " is not in the image");
    return inverse(*k);
}

CocycleTable::CocycleTable(Kind kind, std::string provenance, WordMetric source)
    : kind_(kind), provenance_(std::move(provenance)), source_(std::move(source))
{
}

std::optional<CocycleTable::Key> CocycleTable::find_key(const GroupElement& g, const MapTable& psi) const
{
    if (kind_ == Kind::alpha) {
        const int rho = source_.length(g);
        if (rho > psi.radius)
            return std::nullopt;
        Key key{g, rho, psi.restrict(rho, source_)};
        if (entries_.count(key))
            return key;
        return std::nullopt;
    }
    for (int rho = 0; rho <= psi.radius; ++rho) {
        Key key{g, rho, psi.restrict(rho, source_)};
        if (entries_.count(key))
            return key;
    }
    return std::nullopt;
}

GroupElement CocycleTable::lookup(const GroupElement& g, const MapTable& psi) const
{
    const auto key = find_key(g, psi);
    if (!key)
        throw TruncationError(provenance_ + ": pair (" + g.to_string() + ", ψ) is not tabled");
    return entries_.at(*key);
}

void CocycleTable::set(const GroupElement& g, const MapTable& psi, const GroupElement& value)
{
    const auto key = find_key(g, psi);
    if (!key)
        throw TruncationError(provenance_ + ": pair (" + g.to_string() + ", ψ) is not tabled");
    entries_[*key] = value;
}

void CocycleTable::insert(const GroupElement& g, int rho, MapTable restriction, GroupElement value)
{
    auto [it, inserted] = entries_.emplace(Key{g, rho, std::move(restriction)}, value);
    if (!inserted && it->second != value)
        throw Error(provenance_ + ": inconsistent values for one table key");
}

void to_json(nlohmann::json& j, const CocycleTable& t)
{
    auto entries = nlohmann::json::array();
    for (const auto& [key, value] : t.entries_view())
        entries.push_back({{"element", std::get<0>(key)},
                           {"rho", std::get<1>(key)},
                           {"restriction", std::get<2>(key)},
                           {"value", value}});
    j = {{"kind", t.kind() == CocycleTable::Kind::alpha ? "alpha" : "beta"},
         {"provenance", t.provenance()},
         {"entries", entries}};
}

std::vector<MapTable> orbit_points(const TruncatedMapSpace& space, int orbit_radius)
{
    if (orbit_radius > space.radius())
        throw PreconditionError("orbit radius exceeds the domain radius");
    std::set<MapTable> points;
    for (const auto& psi : space.slice())
        for (const auto& h : space.source().ball(orbit_radius))
            points.insert(gamma_act(h, psi, space.source()));
    return {points.begin(), points.end()};
}

CocycleTable tabulate_alpha(const TruncatedMapSpace& space, int element_radius, int orbit_radius)
{
    const auto& src = space.source();
    CocycleTable table(CocycleTable::Kind::alpha, "gromov-alpha", src);
    for (const auto& p : orbit_points(space, orbit_radius))
        for (const auto& g : src.ball(std::min(element_radius, p.radius)))
            table.insert(g, src.length(g), p.restrict(src.length(g), src), cocycle_alpha(g, p));
    return table;
}

CocycleTable tabulate_beta(const TruncatedMapSpace& space, int element_radius, int orbit_radius)
{
    const auto& src = space.source();
    CocycleTable table(CocycleTable::Kind::beta, "gromov-beta", src);
    for (const auto& p : orbit_points(space, orbit_radius))
        for (const auto& lambda : space.target().ball(element_radius)) {
            const auto k = p.preimage(inverse(lambda));
            if (!k)
                continue;
            const int rho = src.length(*k);
            table.insert(lambda, rho, p.restrict(rho, src), inverse(*k));
        }
    return table;
}

Morphism<MapTable> gromov_morphism(const TruncatedMapSpace& space, const CocycleTable& alpha)
{
    auto table = std::make_shared<const CocycleTable>(alpha);
    const auto src = space.source();
    Morphism<MapTable> out;
    out.provenance = alpha.provenance();
    out.source = space.source().group();
    out.target = space.target().group();
    out.source_act = [src](const GroupElement& g, const MapTable& psi) { return gamma_act(g, psi, src); };
    out.target_act = [src](const GroupElement& l, const MapTable& psi) { return lambda_act(l, psi, src); };
    out.point_map = [](const MapTable& psi) { return psi; };
    out.cocycle = [table](const GroupElement& g, const MapTable& psi) { return table->lookup(g, psi); };
    return out;
}

Morphism<MapTable> gromov_inverse_morphism(const TruncatedMapSpace& space, const CocycleTable& beta)
{
    auto table = std::make_shared<const CocycleTable>(beta);
    const auto src = space.source();
    Morphism<MapTable> out;
    out.provenance = beta.provenance();
    out.source = space.target().group();
    out.target = space.source().group();
    out.source_act = [src](const GroupElement& l, const MapTable& psi) { return lambda_act(l, psi, src); };
    out.target_act = [src](const GroupElement& g, const MapTable& psi) { return gamma_act(g, psi, src); };
    out.point_map = [](const MapTable& psi) { return psi; };
    out.cocycle = [table](const GroupElement& l, const MapTable& psi) { return table->lookup(l, psi); };
    return out;
}

Verdict check_omega_bilipschitz(const TruncatedMapSpace& space)
{
    Verdict v("every map in Omega is C-bi-Lipschitz");
    double worst = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < space.omega().size(); ++i) {
        const auto& psi = space.omega()[i];
        auto report = is_bilipschitz_on_ball([&](const GroupElement& h) { return psi.at(h); }, space.radius(),
                                             space.constant(), space.source(), space.target());
        worst = std::max(worst, report.required);
        pairs += report.pairs;
        if (!report.pass && !v.saturated())
            v.fail({{"map_index", i}, {"report", report}});
        else if (!report.pass)
            v.pass = false;
    }
    v.info = {{"maps", space.omega().size()}, {"pairs", pairs}, {"C", space.constant()}, {"max_required", worst}};
    return v;
}

Verdict check_cocycle_identity(const TruncatedMapSpace& space, const CocycleTable& alpha, int window)
{
    if (2 * window > space.radius())
        throw PreconditionError("cocycle identity window needs 2W <= R");
    const auto eta = gromov_morphism(space, alpha);
    const auto& elements = space.source().ball(window);
    auto v = check_cocycle_identity<MapTable>(eta, elements, space.slice());
    v.info["coverage"] = {{"R", space.radius()}, {"R_t", space.translate_radius()}, {"W", window}};
    return v;
}

Verdict check_fundamental_domain(const TruncatedMapSpace& space, int window)
{
    if (window < 0 || 2 * window > space.radius())
        throw PreconditionError("fundamental-domain window needs 0 <= 2W <= R");
    Verdict v("slice is a fundamental domain for both actions");
    const auto& src = space.source();
    const auto e = src.group().identity();
    const auto e_target = space.target().group().identity();
    const int lambda_radius = static_cast<int>(std::ceil(space.constant() * window));
    const auto& lambdas = space.target().ball(lambda_radius);
    std::size_t examined = 0;
    for (std::size_t i = 0; i < space.omega().size(); ++i) {
        const auto& psi = space.omega()[i];
        const auto k = psi.preimage(e_target);
        if (!k || src.length(*k) > window)
            continue;
        ++examined;
        std::size_t gamma_hits = 0;
        for (const auto& g : src.ball(window))
            if (raw_translate(g, e_target, psi, src).at(e) == e_target)
                ++gamma_hits;
        std::size_t lambda_hits = 0;
        for (const auto& l : lambdas)
            if (l * psi.at(e) == e_target)
                ++lambda_hits;
        if ((gamma_hits != 1 || lambda_hits != 1) && !v.saturated())
            v.fail({{"map_index", i}, {"gamma_hits", gamma_hits}, {"lambda_hits", lambda_hits}});
        else if (gamma_hits != 1 || lambda_hits != 1)
            v.pass = false;
    }
    v.info = {{"examined", examined},
              {"coverage", {{"R", space.radius()}, {"R_t", space.translate_radius()}, {"W", window}}},
              {"lambda_radius", lambda_radius}};
    return v;
}

Verdict check_orbit_equality(const TruncatedMapSpace& space, const MapTable& x, int window)
{
    if (window < 0 || 2 * window > space.radius())
        throw PreconditionError("orbit window needs 0 <= 2W <= R");
    Verdict v("Gamma and Lambda orbits coincide");
    const auto& src = space.source();
    const int inner = space.radius() - window;
    std::set<MapTable> gamma_side;
    for (const auto& g : src.ball(window)) {
        gamma_side.insert(gamma_act(g, x, src).restrict(inner, src));
        const auto back = cocycle_beta(cocycle_alpha(g, x), x);
        if (back != g && !v.saturated())
            v.fail({{"beta(alpha(g,x),x)", back}, {"g", g}});
    }
    std::set<MapTable> lambda_side;
    const int lambda_radius = static_cast<int>(std::ceil(space.constant() * window));
    for (const auto& l : space.target().ball(lambda_radius)) {
        const auto k = x.preimage(inverse(l));
        if (!k || src.length(*k) > window)
            continue;
        lambda_side.insert(lambda_act(l, x, src).restrict(inner, src));
    }
    if (gamma_side != lambda_side)
        v.fail({{"gamma_orbit_size", gamma_side.size()}, {"lambda_orbit_size", lambda_side.size()}});
    v.info = {{"gamma_orbit_size", gamma_side.size()},
              {"lambda_orbit_size", lambda_side.size()},
              {"coverage", {{"R", space.radius()}, {"W", window}}}};
    return v;
}

void to_json(nlohmann::json& j, const FreenessReport& r)
{
    j = {{"pass", r.pass},
         {"fixed_in_slice", r.fixed_in_slice},
         {"fixed_in_product", r.fixed_in_product},
         {"checked", r.checked}};
    if (r.slice_witness)
        j["slice_witness"] = *r.slice_witness;
    if (r.product_witness)
        j["product_witness"] = *r.product_witness;
}

FreenessReport force_freeness(const TruncatedMapSpace& space, const OdometerSpace& odometer, int window,
                              const std::vector<DigitPoint>& sample)
{
    const auto& gamma = space.source().group();
    const auto& lambda = space.target().group();
    if (gamma.kind != GroupKind::lattice || lambda.kind != GroupKind::lattice)
        throw PreconditionError("freeness forcing uses a lattice odometer and needs lattice groups");
    if (odometer.dim() != gamma.rank + lambda.rank)
        throw DimensionMismatch("odometer dimension must be d_Gamma + d_Lambda");
    if (window < 0 || window > space.radius())
        throw PreconditionError("freeness window exceeds the domain radius");
    const auto& src = space.source();
    FreenessReport r;
    for (const auto& psi : space.slice()) {
        for (const auto& g : src.ball(window)) {
            if (g.is_identity())
                continue;
            const auto moved = gamma_act(g, psi, src);
            const bool fixes_map = moved == psi.restrict(moved.radius, src);
            if (fixes_map) {
                ++r.fixed_in_slice;
                if (!r.slice_witness)
                    r.slice_witness = nlohmann::json{{"g", g}, {"psi", psi}};
            }
            LatticeVector shift = g.coords();
            const auto a = cocycle_alpha(g, psi).coords();
            shift.insert(shift.end(), a.begin(), a.end());
            for (const auto& y : sample) {
                ++r.checked;
                if (fixes_map && odometer_add(y, shift, odometer) == y) {
                    ++r.fixed_in_product;
                    if (!r.product_witness)
                        r.product_witness = nlohmann::json{{"g", g}, {"y", y}};
                }
            }
        }
    }
    r.pass = r.fixed_in_product == 0;
    return r;
}

} // namespace oelab
