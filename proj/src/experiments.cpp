#include "oelab/experiments.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "oelab/bilipschitz.hpp"
#include "oelab/cohomology.hpp"
#include "oelab/errors.hpp"
#include "oelab/full_group.hpp"
#include "oelab/gromov.hpp"
#include "oelab/odometer.hpp"

namespace oelab::cli {

namespace {

using nlohmann::json;

class Report {
public:
    Report(const ExperimentConfig& config) : doc_{{"schema_version", schema_version}, {"command", config.command}}
    {
        doc_["config"] = config_to_json(config);
        doc_["checks"] = json::array();
    }

    std::string stage = "config";

    void add(const Verdict& v, const std::string& anchor)
    {
        json entry = v;
        entry["anchor"] = anchor;
        doc_["checks"].push_back(std::move(entry));
        pass_ = pass_ && v.pass;
    }

    json& doc() { return doc_; }

    RunResult finish()
    {
        doc_["pass"] = pass_;
        return {doc_, pass_ ? all_pass : verification_failure};
    }

    RunResult error(const char* type, const std::string& message)
    {
        doc_["pass"] = false;
        doc_["error"] = {{"stage", stage}, {"type", type}, {"message", message}};
        return {doc_, configuration_error};
    }

private:
    json doc_;
    bool pass_ = true;
};

template <class F>
RunResult guarded(const ExperimentConfig& config, F body)
{
    Report report(config);
    try {
        body(report);
        return report.finish();
    } catch (const PreconditionError& e) {
        return report.error("precondition", e.what());
    } catch (const TruncationError& e) {
        return report.error("truncation", e.what());
    } catch (const BudgetExceeded& e) {
        return report.error("budget", e.what());
    } catch (const std::exception& e) {
        return report.error("internal", e.what());
    }
}

void validate(const ExperimentConfig& c)
{
    if (c.radius < 0 || c.translate_radius < 0 || c.window < 0)
        throw PreconditionError("radii must be non-negative");
    if (c.n < 1 || c.samples < 1)
        throw PreconditionError("n and samples must be positive");
    if (!(c.tol > 0.0))
        throw PreconditionError("tolerance must be positive");
}

MatrixText require_matrix(const std::string& text, const char* flag)
{
    if (text.empty())
        throw PreconditionError(std::string(flag) + " is required");
    return parse_matrix(text);
}

json matrix_text_json(const MatrixText& m)
{
    json rows = json::array();
    for (const auto& row : m.entries)
        rows.push_back(row);
    return rows;
}

IntMatrix require_integer(const RealMatrix& A)
{
    IntMatrix out;
    if (!as_integer_matrix(A, out))
        throw PreconditionError("odometer actions need an integer matrix");
    return out;
}

std::vector<int> distance_radii(int d)
{
    if (d <= 2)
        return {10, 25, 50};
    if (d == 3)
        return {5, 12, 25};
    return {2, 4, 6};
}

int box_radius(int d) { return d <= 2 ? 20 : d == 3 ? 10 : 3; }

std::vector<LatticeVector> lattice_samples(int d, int count, std::mt19937_64& rng)
{
    std::uniform_int_distribution<std::int64_t> coord(-50, 50);
    std::vector<LatticeVector> out;
    for (int s = 0; s < count; ++s) {
        LatticeVector v(static_cast<std::size_t>(d));
        for (auto& x : v)
            x = coord(rng);
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<DigitPoint> odometer_samples(const OdometerSpace& space, int count, std::mt19937_64& rng)
{
    std::vector<DigitPoint> out;
    for (int s = 0; s < count; ++s) {
        DigitPoint x = zero_point(space);
        for (int i = 0; i < space.dim(); ++i) {
            std::uniform_int_distribution<int> digit(0, space.base(i) - 1);
            for (auto& dgt : x.digits[static_cast<std::size_t>(i)])
                dgt = static_cast<std::uint8_t>(digit(rng));
        }
        out.push_back(std::move(x));
    }
    return out;
}

Verdict recovery_verdict(const InvariantMatrix& m, const RealMatrix& A, double bound)
{
    Verdict v("psi1 recovers A");
    const double error = (m.matrix - A).cwiseAbs().maxCoeff();
    if (error > bound)
        v.fail({{"error", error}, {"bound", bound}});
    v.info = {{"error", error}, {"bound", bound}};
    return v;
}

Verdict exact_matrix_verdict(const char* name, const RealMatrix& got, const RealMatrix& want)
{
    Verdict v(name);
    if (got != want)
        v.fail({{"got", matrix_to_json(got)}, {"want", matrix_to_json(want)}});
    return v;
}

// ψ_t(h) = f(t + h) − f(t) on ball(R).
MapTable normalized_translate(const BiLipMap& f, const LatticeVector& t, const WordMetric& metric, int radius)
{
    MapTable psi;
    psi.radius = radius;
    const auto base = f(t);
    for (const auto& h : metric.ball(radius)) {
        auto v = t;
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] += h.coords()[i];
        auto image = f(v);
        for (std::size_t i = 0; i < image.size(); ++i)
            image[i] -= base[i];
        psi.values.emplace(h, GroupElement::lattice(std::move(image)));
    }
    return psi;
}

Verdict orbit_model_agreement(const BiLipMap& f)
{
    constexpr int radius = 2;
    Verdict v("tabled Gromov cocycle agrees with the orbit model");
    const auto metric = WordMetric::standard(Group::lattice(f.dim()));
    const SeedMap seed = [&f](const GroupElement& g) { return f.on_group(g); };
    const auto space = build_omega(seed, metric, metric, radius, radius, seed_constant(seed, 2 * radius, metric, metric));
    const auto model = orbit_morphism(f);
    std::size_t checked = 0;
    for (const auto& t : metric.ball(radius)) {
        const auto psi = normalized_translate(f, t.coords(), metric, radius);
        if (!std::binary_search(space.slice().begin(), space.slice().end(), psi)) {
            v.fail({{"t", t}, {"reason", "normalized translate missing from the slice"}});
            continue;
        }
        for (const auto& g : metric.ball(radius)) {
            ++checked;
            const auto tabled = cocycle_alpha(g, psi);
            const auto modeled = model.cocycle(g, t.coords());
            if (tabled != modeled && !v.saturated())
                v.fail({{"t", t}, {"g", g}, {"tabled", tabled}, {"model", modeled}});
        }
    }
    v.info = {{"checked", checked}, {"R", radius}};
    return v;
}

} // namespace

json config_to_json(const ExperimentConfig& c)
{
    return {{"matrix", c.matrix}, {"matrix_b", c.matrix_b}, {"p", c.p},
            {"depth", c.depth},   {"radius", c.radius},     {"translate_radius", c.translate_radius},
            {"window", c.window}, {"n", c.n},               {"samples", c.samples},
            {"tol", c.tol},       {"seed", c.seed},         {"corrupt", c.corrupt}};
}

RunResult cmd_realize(const ExperimentConfig& config)
{
    return guarded(config, [&](Report& r) {
        validate(config);
        const auto text = require_matrix(config.matrix, "--matrix");
        const RealMatrix& A = text.value;
        const int d = static_cast<int>(A.rows());
        r.doc()["A"] = matrix_text_json(text);

        r.stage = "decompose";
        const auto f = realize_bilipschitz(A, config.tol);
        r.doc()["ops"] = ops_to_json(f.ops());
        Verdict rec("factors multiply back to A");
        const double rec_error = (product_of(f.ops(), d) - A).cwiseAbs().maxCoeff();
        if (rec_error > config.tol)
            rec.fail({{"error", rec_error}, {"tol", config.tol}});
        rec.info = {{"error", rec_error}, {"factors", f.ops().size()}};
        r.add(rec, "A = E_1 E_2 ... E_m with shears and diag(-1,1,...,1)");

        r.stage = "realize";
        const auto profile = distance_profile(f, A, distance_radii(d));
        const double C = profile.back().constant;
        r.doc()["distance_profile"] = profile;
        r.doc()["C"] = C;
        const int box = box_radius(d);
        r.add(injectivity_check_on_box(f, d, box), "v -> f_A(v) is a bijection of Z^d");
        Verdict inverse_exact("floor-shear inverse is exact on the box");
        for (const auto& v : box_points(d, box))
            if (f.inverse(f(v)) != v && !inverse_exact.saturated())
                inverse_exact.fail({{"v", v}, {"round_trip", f.inverse(f(v))}});
        inverse_exact.info = {{"R", box}};
        r.add(inverse_exact, "f_A^-1(f_A(v)) = v");

        r.stage = "gromov cocycle";
        r.add(orbit_model_agreement(f), "alpha(g, psi) = psi(g^-1)^-1");

        r.stage = "psi1";
        std::mt19937_64 rng(config.seed);
        const auto samples = lattice_samples(d, config.samples, rng);
        const auto m = psi1_from_cocycle<LatticeVector>(orbit_morphism(f), config.n, samples, C);
        r.doc()["invariant"] = m;
        r.add(recovery_verdict(m, A, C / config.n), "|alpha(g, x) - A g| < C, M = lim alpha(n e_i, x)/n");
        r.add(check_det_pm1(m.matrix, std::max(10.0 * C * d / config.n, config.tol)), "det M = +-1");
    });
}

RunResult cmd_gromov_check(const ExperimentConfig& config)
{
    return guarded(config, [&](Report& r) {
        validate(config);
        if (2 * config.window > config.radius)
            throw PreconditionError("the window must satisfy 2W <= R");
        if (!config.corrupt.empty() && config.corrupt != "alpha")
            throw PreconditionError("unknown corruption target \"" + config.corrupt + "\"");
        const auto text = require_matrix(config.matrix, "--matrix");
        const int d = static_cast<int>(text.value.rows());
        r.doc()["A"] = matrix_text_json(text);

        r.stage = "seed";
        const auto f = realize_bilipschitz(text.value, config.tol);
        const auto metric = WordMetric::standard(Group::lattice(d));
        const SeedMap seed = [&f](const GroupElement& g) { return f.on_group(g); };
        const double C = seed_constant(seed, config.radius + config.translate_radius, metric, metric);

        r.stage = "build_omega";
        const int R = config.radius;
        const int W = config.window;
        const auto space = build_omega(seed, metric, metric, R, config.translate_radius, C);
        r.doc()["space"] = space;
        json growth = json::array();
        for (int rt = 0; rt < config.translate_radius; ++rt)
            growth.push_back(build_omega(seed, metric, metric, R, rt, C).omega().size());
        growth.push_back(space.omega().size());
        r.doc()["omega_size_by_translate_radius"] = growth;

        r.stage = "bi-Lipschitz closure";
        r.add(check_omega_bilipschitz(space), "every psi in Omega is C-bi-Lipschitz");

        r.stage = "cocycle tables";
        auto alpha = tabulate_alpha(space, 2 * W, W);
        const int lambda_radius = static_cast<int>(std::ceil(C * W));
        const auto beta = tabulate_beta(space, lambda_radius, W);
        if (config.corrupt == "alpha") {
            const auto& x = space.slice().front();
            const auto& ball1 = metric.ball(1);
            const auto g = ball1.front().is_identity() ? ball1.back() : ball1.front();
            const auto good = alpha.lookup(g, x);
            alpha.set(g, x, good * g);
            r.doc()["corrupted_entry"] = {{"g", g}, {"psi", x}, {"was", good}, {"now", good * g}};
        }
        r.doc()["table_sizes"] = {{"alpha", alpha.size()}, {"beta", beta.size()}};

        r.stage = "cocycle identity";
        r.add(check_cocycle_identity(space, alpha, W), "alpha(gh, psi) = alpha(g, h.psi) alpha(h, psi)");

        r.stage = "fundamental domain";
        r.add(check_fundamental_domain(space, W), "X = {psi : psi(e) = e} meets each Gamma- and Lambda-orbit once");

        r.stage = "orbit equality";
        Verdict orbits("Gamma and Lambda orbits coincide on the slice");
        for (std::size_t i = 0; i < space.slice().size(); ++i) {
            const auto one = check_orbit_equality(space, space.slice()[i], W);
            if (!one.pass && !orbits.saturated())
                orbits.fail({{"slice_index", i}, {"witnesses", one.witnesses}});
            else if (!one.pass)
                orbits.pass = false;
        }
        orbits.info = {{"points", space.slice().size()}, {"W", W}};
        r.add(orbits, "Gamma.x = Lambda.x and beta(alpha(g, x), x) = g");

        r.stage = "inverse identities";
        const auto eta = gromov_morphism(space, alpha);
        const auto eta_inv = gromov_inverse_morphism(space, beta);
        const auto& elements = metric.ball(W);
        r.add(check_equivariance<MapTable>(eta, elements, space.slice()), "g.psi = alpha(g, psi).psi");
        r.add(check_inverse_identities<MapTable>(eta, eta_inv, elements, space.slice()),
              "g = beta(alpha(g, x), x) and beta(alpha(g, g^-1 x), alpha(g, g^-1 x)^-1 x) = g");

        r.stage = "freeness";
        const auto y_space = OdometerSpace::uniform(2 * d, config.p, config.depth);
        std::mt19937_64 rng(config.seed);
        const auto freeness = force_freeness(space, y_space, W, odometer_samples(y_space, 16, rng));
        Verdict free("diagonal action on X x Y is free");
        if (!freeness.pass)
            free.fail(freeness);
        free.info = freeness;
        r.add(free, "g.(psi, y) = (g.psi, (g, alpha(g, psi)).y)");
    });
}

RunResult cmd_odometer(const ExperimentConfig& config)
{
    return guarded(config, [&](Report& r) {
        validate(config);
        const auto text = require_matrix(config.matrix, "--matrix");
        r.doc()["A"] = matrix_text_json(text);
        const IntMatrix A = require_integer(text.value);
        const int d = static_cast<int>(A.rows());
        const auto space = OdometerSpace::uniform(d, config.p, config.depth);
        require_unimodular_action(A, space);
        const auto metric = WordMetric::standard(Group::lattice(d));
        std::mt19937_64 rng(config.seed);

        r.stage = "bijectivity";
        r.add(bijectivity_check_depthN(A, space), "x -> A x permutes (Z/p^N)^d");

        r.stage = "equivariance";
        const auto count = static_cast<int>(std::min<std::uint64_t>(1000, space.point_count()));
        const auto points = odometer_samples(space, count, rng);
        const auto eta = odometer_constant_morphism(A, space);
        const auto eta_inv = odometer_constant_morphism(unimodular_inverse(A), space);
        const auto& ball3 = metric.ball(3);
        r.add(check_equivariance<DigitPoint>(eta, ball3, points), "phi_A(g + x) = A g + phi_A(x)");
        r.add(check_inverse_identities<DigitPoint>(eta, eta_inv, ball3, std::span(points).first(
                  std::min<std::size_t>(points.size(), 100))),
              "g = alpha_inv(alpha(g, x), phi(x))");

        r.stage = "minimality";
        r.add(minimality_witness(space, std::min(2, config.depth)), "every orbit is dense");
        const auto zero = zero_point(space);
        const ClopenSet u({cylinder_of(zero, 1)});
        const auto wandering = wandering_check(u, config.p, space);
        Verdict no_wandering("depth-1 cylinder is not wandering");
        if (!wandering.witness)
            no_wandering.fail({{"U", u}, {"searched", wandering.searched}});
        no_wandering.info = wandering;
        r.add(no_wandering, "gU meets U for some g != e");

        r.stage = "Haar invariance";
        Verdict haar("Haar measure is invariant");
        for (int trial = 0; trial < 3; ++trial)
            for (const auto& piece : random_cylinder_partition(space, rng, std::min(2, config.depth)))
                for (const auto& g : metric.generators().elements()) {
                    const auto before = haar_measure(piece, space);
                    const auto after = haar_measure(translate(piece, g.coords(), space), space);
                    if (before != after && !haar.saturated())
                        haar.fail({{"U", piece}, {"g", g}, {"before", to_string(before)}, {"after", to_string(after)}});
                }
        // φ_A pushes the uniform measure on depth-N points to itself.
        std::map<Cylinder, std::uint64_t> image_counts;
        const auto total = space.point_count();
        for (std::uint64_t i = 0; i < total; ++i)
            ++image_counts[cylinder_of(matrix_act(A, point_from_index(i, space), space), 1)];
        for (const auto& [c, hits] : image_counts) {
            const Rational measure(hits, total);
            if (measure != haar_measure(c, space) && !haar.saturated())
                haar.fail({{"cylinder", c}, {"pushforward", to_string(measure)}});
        }
        haar.info = {{"depth1_cylinders", image_counts.size()}};
        r.add(haar, "mu(gU) = mu(U), mu(phi_A(U)) = mu(U)");

        r.stage = "full group";
        std::vector<FullGroupElement> sample;
        for (int k = 0; k < 4; ++k)
            sample.push_back(random_element(space, rng, 3, std::min(2, config.depth), 2));
        Verdict ad("ad(g) is realized by g");
        for (const auto& g : metric.generators().elements()) {
            const auto one = ad_realization_check(g.coords(), sample, space);
            if (!one.pass && !ad.saturated())
                ad.fail({{"g", g}, {"witnesses", one.witnesses}});
        }
        ad.info = {{"samples", sample.size()}};
        r.add(ad, "ad(g)(T) = g T g^-1 is implemented by x -> g + x");

        r.stage = "psi1";
        const auto psi_points = odometer_samples(space, std::min(config.samples, 64), rng);
        const auto m = psi1_from_cocycle<DigitPoint>(eta, config.n, psi_points, 0.0);
        r.doc()["invariant"] = m;
        r.add(exact_matrix_verdict("psi1 of the constant cocycle is A", m.matrix, A.cast<double>()),
              "Psi1(phi_A) = A");
    });
}

RunResult cmd_psi_functoriality(const ExperimentConfig& config)
{
    return guarded(config, [&](Report& r) {
        validate(config);
        const auto text_a = require_matrix(config.matrix, "--matrix");
        const int d = static_cast<int>(text_a.value.rows());
        const auto text_b = config.matrix_b.empty() ? MatrixText{RealMatrix::Identity(d, d), {}}
                                                    : parse_matrix(config.matrix_b);
        if (text_b.value.rows() != d)
            throw DimensionMismatch("--matrix and --matrix-b have different dimensions");
        const RealMatrix& A = text_a.value;
        const RealMatrix& B = text_b.value;
        r.doc()["A"] = matrix_text_json(text_a);
        r.doc()["B"] = matrix_to_json(B);
        r.doc()["composition"] = "eta_B o eta_A, expected matrix B A";
        r.doc()["measure_dependence"] = "not resolved; psi1 averages over the listed samples";
        std::mt19937_64 rng(config.seed);
        IntMatrix a_int;
        IntMatrix b_int;
        const RealMatrix BA = B * A;

        if (as_integer_matrix(A, a_int) && as_integer_matrix(B, b_int)) {
            r.stage = "constant cocycles";
            r.doc()["mode"] = "odometer constant cocycles";
            const auto space = OdometerSpace::uniform(d, config.p, config.depth);
            const auto theta = odometer_constant_morphism(a_int, space);
            const auto eta = odometer_constant_morphism(b_int, space);
            const auto composed = compose_morphisms(eta, theta);
            const auto samples = odometer_samples(space, std::min(config.samples, 64), rng);
            const auto m_a = psi1_from_cocycle<DigitPoint>(theta, config.n, samples, 0.0);
            const auto m_b = psi1_from_cocycle<DigitPoint>(eta, config.n, samples, 0.0);
            const auto m_ba = psi1_from_cocycle<DigitPoint>(composed, config.n, samples, 0.0);
            r.doc()["invariants"] = {{"A", m_a}, {"B", m_b}, {"BA", m_ba}};
            r.add(exact_matrix_verdict("psi1 of the composite is B A", m_ba.matrix, BA),
                  "alpha_{eta o theta}(g, x) = alpha_eta(alpha_theta(g, x), phi_theta(x))");
            r.add(functoriality_check(m_ba, m_b, m_a, 0.0), "Psi1(eta o theta) = Psi1(eta) Psi1(theta)");
            return;
        }

        r.stage = "realize";
        r.doc()["mode"] = "realized bi-Lipschitz maps";
        const auto f_a = realize_bilipschitz(A, config.tol);
        const auto f_b = realize_bilipschitz(B, config.tol);
        const int radius = distance_radii(d).back();
        const double c_a = bounded_distance_constant(f_a, A, radius).constant;
        const double c_b = bounded_distance_constant(f_b, B, radius).constant;
        r.doc()["C"] = {{"A", c_a}, {"B", c_b}, {"R", radius}};

        r.stage = "psi1";
        const auto theta = orbit_morphism(f_a);
        const auto eta = orbit_morphism(f_b);
        const auto composed = compose_morphisms(eta, theta);
        const auto samples = lattice_samples(d, config.samples, rng);
        const auto m_a = psi1_from_cocycle<LatticeVector>(theta, config.n, samples, c_a);
        const auto m_b = psi1_from_cocycle<LatticeVector>(eta, config.n, samples, c_b);
        const auto m_ba = psi1_from_cocycle<LatticeVector>(composed, config.n, samples,
                                                           c_b + norm_inf(B) * c_a);
        r.doc()["invariants"] = {{"A", m_a}, {"B", m_b}, {"BA", m_ba}};
        const double budget = functoriality_budget(B, c_b, A, c_a, config.n);
        r.add(functoriality_check(m_ba, m_b, m_a, budget), "Psi1(eta o theta) = Psi1(eta) Psi1(theta)");
    });
}

RunResult run(const ExperimentConfig& config)
{
    if (config.command == "realize")
        return cmd_realize(config);
    if (config.command == "gromov-check")
        return cmd_gromov_check(config);
    if (config.command == "odometer")
        return cmd_odometer(config);
    if (config.command == "psi-functoriality")
        return cmd_psi_functoriality(config);
    return guarded(config, [&](Report&) { throw PreconditionError("unknown command \"" + config.command + "\""); });
}

std::string summarize(const nlohmann::json& report)
{
    std::ostringstream out;
    out << report.value("command", "") << "\n";
    for (const auto& c : report.value("checks", json::array()))
        out << (c.value("pass", false) ? "  PASS  " : "  FAIL  ") << c.value("check", "") << "\n";
    if (report.contains("error")) {
        const auto& e = report["error"];
        out << "  ERROR [" << e.value("stage", "") << "] " << e.value("message", "") << "\n";
    }
    if (report.contains("error"))
        out << "configuration error\n";
    else
        out << (report.value("pass", false) ? "all checks passed" : "verification failed") << "\n";
    return out.str();
}

} // namespace oelab::cli
