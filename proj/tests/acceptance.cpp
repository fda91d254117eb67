// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oelab/bilipschitz.hpp"
#include "oelab/cohomology.hpp"
#include "oelab/full_group.hpp"
#include "oelab/gromov.hpp"

using namespace oelab;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Criterion = std::function<void(Outcome&)>;

IntMatrix imat2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d)
{
    IntMatrix A(2, 2);
    A << a, b, c, d;
    return A;
}

double max_error(const RealMatrix& A, const RealMatrix& B) { return (A - B).cwiseAbs().maxCoeff(); }

// Products of at most 10 shears (|λ| ≤ 2) and sign flips, alternating d = 2 and d = 3.
std::vector<RealMatrix> test_matrices()
{
    std::mt19937_64 rng(2024);
    std::vector<RealMatrix> out;
    for (int k = 0; k < 20; ++k) {
        const int d = 2 + k % 2;
        std::uniform_int_distribution<int> factors(1, 10);
        std::uniform_int_distribution<int> coord(0, d - 1);
        std::uniform_real_distribution<double> lambda(-2.0, 2.0);
        std::bernoulli_distribution flip(0.2);
        RealMatrix A = RealMatrix::Identity(d, d);
        const int m = factors(rng);
        for (int j = 0; j < m; ++j) {
            RealMatrix E = RealMatrix::Identity(d, d);
            const int i = coord(rng);
            if (flip(rng)) {
                E(i, i) = -1.0;
            } else {
                int s = coord(rng);
                if (s == i)
                    s = (i + 1) % d;
                E(i, s) = lambda(rng);
            }
            A = A * E;
        }
        out.push_back(A);
    }
    return out;
}

std::vector<LatticeVector> box_samples(int d, int count, std::mt19937_64& rng)
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

void realization_recovery(Outcome& out)
{
    constexpr int n = 1024;
    std::mt19937_64 rng(7);
    double worst_ratio = 0.0;
    double worst_det = 0.0;
    for (const auto& A : test_matrices()) {
        const int d = static_cast<int>(A.rows());
        const auto f = realize_bilipschitz(A);
        const double C = bounded_distance_constant(f, A, 50).constant;
        const auto samples = box_samples(d, 256, rng);
        const auto m = psi1_from_cocycle<LatticeVector>(orbit_morphism(f), n, samples, C);
        const double error = max_error(m.matrix, A);
        const double det_dev = std::abs(std::abs(m.matrix.determinant()) - 1.0);
        const double det_tol = 10.0 * C * d / n;
        out.require(error <= C / n, "||M - A|| <= C/n");
        out.require(det_dev <= det_tol, "||det M| - 1| <= 10Cd/n");
        if (C > 0) {
            worst_ratio = std::max(worst_ratio, error / (C / n));
            worst_det = std::max(worst_det, det_dev / det_tol);
        } else {
            out.require(error == 0.0, "exact recovery when C = 0");
        }
    }
    out.detail << "20 matrices, n=1024: max ||M-A||/(C/n) = " << worst_ratio
               << ", max det deviation / (10Cd/n) = " << worst_det;
}

void decomposition_reconstruction(Outcome& out)
{
    double worst = 0.0;
    for (const auto& A : test_matrices()) {
        const double e = max_error(product_of(decompose_unimodular(A), static_cast<int>(A.rows())), A);
        worst = std::max(worst, e);
        out.require(e <= 1e-9, "reconstruction within 1e-9");
    }
    // Every permutation matrix in d = 2, 3: exact product and exact integer action.
    std::size_t perms = 0;
    for (int d : {2, 3}) {
        std::vector<int> p(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i)
            p[static_cast<std::size_t>(i)] = i;
        do {
            RealMatrix P = RealMatrix::Zero(d, d);
            for (int i = 0; i < d; ++i)
                P(i, p[static_cast<std::size_t>(i)]) = 1.0;
            const auto ops = decompose_unimodular(P);
            out.require(product_of(ops, d) == P, "permutation product exact");
            const BiLipMap f(P, ops);
            for (const auto& v : box_points(d, 4)) {
                LatticeVector pv(static_cast<std::size_t>(d));
                for (int i = 0; i < d; ++i)
                    pv[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(p[static_cast<std::size_t>(i)])];
                if (f(v) != pv) {
                    out.require(false, "permutation realized exactly on Z^d");
                    break;
                }
            }
            ++perms;
        } while (std::next_permutation(p.begin(), p.end()));
    }
    // A single transposition is exactly three shears and one sign flip.
    RealMatrix swap(2, 2);
    swap << 0, 1, 1, 0;
    const auto ops = decompose_unimodular(swap);
    std::size_t shears = 0;
    std::size_t flips = 0;
    for (const auto& op : ops)
        (std::holds_alternative<Shear>(op) ? shears : flips)++;
    out.require(shears == 3 && flips == 1, "swap emitted as 3 shears + sign flip");
    out.detail << "max reconstruction error " << worst << ", " << perms << " permutation matrices exact, swap = "
               << shears << " shears + " << flips << " sign flip";
}

void gromov_battery(Outcome& out)
{
    constexpr int R = 6;
    constexpr int Rt = 6;
    constexpr int W = 2;
    RealMatrix A(2, 2);
    A << 1, 0.5, 0, 1;
    const auto f = realize_bilipschitz(A);
    const auto metric = WordMetric::standard(Group::lattice(2));
    const SeedMap seed = [&f](const GroupElement& g) { return f.on_group(g); };
    const double C = seed_constant(seed, R + Rt, metric, metric);
    const auto space = build_omega(seed, metric, metric, R, Rt, C);
    const auto alpha = tabulate_alpha(space, 2 * W, W);
    const auto beta = tabulate_beta(space, static_cast<int>(std::ceil(C * W)), W);

    out.require(check_omega_bilipschitz(space).pass, "Omega is C-bi-Lipschitz");
    out.require(check_cocycle_identity(space, alpha, W).pass, "cocycle identity");
    out.require(check_fundamental_domain(space, W).pass, "fundamental domain");
    bool orbits = true;
    for (const auto& x : space.slice())
        orbits = orbits && check_orbit_equality(space, x, W).pass;
    out.require(orbits, "orbit equality");
    const auto eta = gromov_morphism(space, alpha);
    const auto eta_inv = gromov_inverse_morphism(space, beta);
    const auto& elements = metric.ball(W);
    out.require(check_equivariance<MapTable>(eta, elements, space.slice()).pass, "equivariance");
    out.require(check_inverse_identities<MapTable>(eta, eta_inv, elements, space.slice()).pass, "inverse identities");
    out.detail << "C=" << C << ", |Omega|=" << space.omega().size() << ", |X|=" << space.slice().size()
               << ", alpha entries " << alpha.size() << ", beta entries " << beta.size();
}

void odometer_example(Outcome& out)
{
    const auto space = OdometerSpace::uniform(2, 3, 4);
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::uint64_t> pick(0, space.point_count() - 1);
    std::vector<DigitPoint> points;
    for (int i = 0; i < 1000; ++i)
        points.push_back(point_from_index(pick(rng), space));
    const auto z2 = WordMetric::standard(Group::lattice(2));
    const auto& ball = z2.ball(3);
    for (const auto& A : {imat2(1, 1, 0, 1), imat2(0, -1, 1, 0)}) {
        const auto bij = bijectivity_check_depthN(A, space);
        out.require(bij.pass && bij.info["points"] == 6561, "permutation of all 3^8 points");
        const auto eta = odometer_constant_morphism(A, space);
        out.require(check_equivariance<DigitPoint>(eta, ball, points).pass, "equivariance on ball(3) x 1000 points");
        const auto m = psi1_from_cocycle<DigitPoint>(eta, 1024, points, 0.0);
        out.require(m.matrix == A.cast<double>(), "psi1 returns A exactly");
    }
    const auto minimal = minimality_witness(space, 2);
    out.require(minimal.pass && minimal.info["visited"] == 81, "minimality at k=2");
    out.detail << "A in {[[1,1],[0,1]], [[0,-1],[1,0]]}: 6561-point permutations, " << ball.size()
               << " x 1000 equivariance pairs each, 81 depth-2 cylinders visited, psi1 exact";
}

void full_group_algebra(Outcome& out)
{
    const auto space = OdometerSpace::uniform(1, 2, 5);
    std::mt19937_64 rng(5);
    std::vector<FullGroupElement> sample;
    for (int i = 0; i < 50; ++i)
        sample.push_back(random_element(space, rng));
    std::vector<DigitPoint> points;
    for (std::uint64_t i = 0; i < space.point_count(); ++i)
        points.push_back(point_from_index(i, space));

    std::size_t rejected = 0;
    for (const auto& t : sample) {
        // Cylinder-level pieces of depth ≥ 1; shifting one label by 1 moves its image onto another piece's.
        std::vector<Piece> pieces;
        for (const auto& p : t.pieces())
            for (const auto& c : p.domain.cylinders()) {
                if (c.prefixes[0].empty()) {
                    for (std::uint8_t digit : {0, 1}) {
                        Cylinder child = c;
                        child.prefixes[0].push_back(digit);
                        pieces.push_back({ClopenSet({child}), p.label});
                    }
                } else {
                    pieces.push_back({ClopenSet({c}), p.label});
                }
            }
        pieces.front().label[0] += 1;
        std::set<DigitPoint> image;
        for (const auto& x : points)
            for (const auto& p : pieces)
                if (p.domain.contains(x))
                    image.insert(odometer_add(x, p.label, space));
        const bool injective = image.size() == points.size();
        try {
            FullGroupElement::make(space, pieces);
        } catch (const PreconditionError&) {
            ++rejected;
        }
        out.require(!injective, "corrupted data is non-bijective");
    }
    out.require(rejected == sample.size(), "make rejects every non-bijective piece set");

    const auto id = FullGroupElement::identity(space);
    std::size_t checks = 0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const auto& a = sample[i];
        const auto& b = sample[(i + 1) % sample.size()];
        const auto& c = sample[(i + 7) % sample.size()];
        const auto ab = compose(a, b);
        const auto ab_c = compose(ab, c);
        const auto a_bc = compose(a, compose(b, c));
        const auto ai = invert(a);
        const auto a_id = compose(a, id);
        for (const auto& x : points) {
            bool ok = ab.apply(x) == a.apply(b.apply(x)) && ab_c.apply(x) == a_bc.apply(x) &&
                      ai.apply(a.apply(x)) == x && a.apply(ai.apply(x)) == x && a_id.apply(x) == a.apply(x);
            checks += 5;
            if (!ok) {
                out.require(false, "group laws pointwise");
                break;
            }
        }
    }
    for (std::int64_t g : {1, -1, 2, -2})
        out.require(ad_realization_check({g}, sample, space).pass, "ad(g) realized by g = " + std::to_string(g));
    out.detail << "50 elements: " << rejected << " corrupted piece sets rejected, " << checks
               << " pointwise group-law checks on 32 points, ad(g) realized for g = +-1, +-2";
}

void word_metrics(Outcome& out)
{
    const auto z2 = WordMetric::standard(Group::lattice(2));
    std::size_t l1_checked = 0;
    for (const auto& g : z2.ball(6)) {
        const auto& c = g.coords();
        out.require(z2.bfs_length(g) == std::llabs(c[0]) + std::llabs(c[1]), "BFS = L1");
        ++l1_checked;
    }
    out.require(l1_checked == 85, "Z^2 ball(6) has 85 points");
    const auto f2 = WordMetric::standard(Group::free(2));
    for (int r = 0; r <= 5; ++r) {
        std::size_t expected = 1;
        for (int k = 1, layer = 4; k <= r; ++k, layer *= 3)
            expected += static_cast<std::size_t>(layer);
        out.require(f2.ball(r).size() == expected, "F2 ball size at radius " + std::to_string(r));
    }
    std::size_t pairs = 0;
    for (const auto* m : {&z2, &f2}) {
        const auto& ball = m->ball(3);
        for (const auto& g : ball)
            for (const auto& h : ball) {
                ++pairs;
                const int dgh = m->distance(g, h);
                if (dgh != m->distance(h, g))
                    out.require(false, "symmetry");
                if (m->bfs_length(g * h) > m->bfs_length(g) + m->bfs_length(h))
                    out.require(false, "triangle inequality");
            }
        for (const auto& g : ball)
            if (m->bfs_length(inverse(g)) != m->bfs_length(g))
                out.require(false, "length symmetry");
    }
    out.detail << l1_checked << " Z^2 points BFS = L1, F2 growth 1, 5, 17, 53, 161, 485, " << pairs
               << " radius-3 pairs symmetric with triangle inequality";
}

void functoriality(Outcome& out)
{
    const auto space = OdometerSpace::uniform(2, 3, 4);
    std::vector<DigitPoint> points;
    for (std::uint64_t i = 0; i < space.point_count(); i += 101)
        points.push_back(point_from_index(i, space));
    const std::vector<IntMatrix> ints{imat2(1, 1, 0, 1), imat2(0, -1, 1, 0), imat2(2, 1, 1, 1), imat2(1, 0, -2, 1)};
    std::size_t exact = 0;
    for (const auto& A : ints)
        for (const auto& B : ints) {
            const auto theta = odometer_constant_morphism(A, space);
            const auto eta = odometer_constant_morphism(B, space);
            const auto m = psi1_from_cocycle<DigitPoint>(compose_morphisms(eta, theta), 1024, points, 0.0);
            const auto ma = psi1_from_cocycle<DigitPoint>(theta, 1024, points, 0.0);
            const auto mb = psi1_from_cocycle<DigitPoint>(eta, 1024, points, 0.0);
            out.require(m.matrix == (B * A).cast<double>() && m.matrix == mb.matrix * ma.matrix,
                        "integer composition exact");
            ++exact;
        }

    constexpr int n = 1024;
    std::mt19937_64 rng(11);
    const auto mats = test_matrices();
    double worst = 0.0;
    std::size_t realized = 0;
    for (std::size_t i = 0; i + 2 < mats.size(); i += 2) {
        const RealMatrix& A = mats[i];
        const RealMatrix& B = mats[i + 2];
        const int d = static_cast<int>(A.rows());
        const auto fa = realize_bilipschitz(A);
        const auto fb = realize_bilipschitz(B);
        const double ca = bounded_distance_constant(fa, A, 50).constant;
        const double cb = bounded_distance_constant(fb, B, 50).constant;
        const auto theta = orbit_morphism(fa);
        const auto eta = orbit_morphism(fb);
        const auto samples = box_samples(d, 256, rng);
        const auto mc = psi1_from_cocycle<LatticeVector>(compose_morphisms(eta, theta), n, samples, 0.0);
        const auto ma = psi1_from_cocycle<LatticeVector>(theta, n, samples, ca);
        const auto mb = psi1_from_cocycle<LatticeVector>(eta, n, samples, cb);
        const double budget = functoriality_budget(B, cb, A, ca, n);
        const auto v = functoriality_check(mc, mb, ma, budget);
        out.require(v.pass, "realized composition within budget");
        if (budget > 0)
            worst = std::max(worst, v.info["error"].get<double>() / budget);
        ++realized;
    }
    out.detail << exact << " integer pairs exact, " << realized
               << " realized pairs at n=1024 with max error/budget = " << worst;
}

void negative_controls(Outcome& out)
{
    // Cocycle identity: one corrupted Gromov table entry.
    {
        RealMatrix A(2, 2);
        A << 1, 0.5, 0, 1;
        const auto f = realize_bilipschitz(A);
        const auto metric = WordMetric::standard(Group::lattice(2));
        const SeedMap seed = [&f](const GroupElement& g) { return f.on_group(g); };
        const auto space = build_omega(seed, metric, metric, 4, 3, seed_constant(seed, 7, metric, metric));
        auto alpha = tabulate_alpha(space, 2, 1);
        const auto g = GroupElement::lattice({1, 0});
        const auto& x = space.slice().front();
        alpha.set(g, x, alpha.lookup(g, x) * g);
        const auto v = check_cocycle_identity(space, alpha, 1);
        out.require(!v.pass && !v.witnesses.empty(), "cocycle identity catches a corrupted entry");
    }
    // Fundamental domain: a non-injective map space has two slice points in one orbit.
    {
        const auto z1 = WordMetric::standard(Group::lattice(1));
        auto table = [&](std::int64_t shift) {
            MapTable psi;
            psi.radius = 4;
            auto fl = [](std::int64_t a) { return a >= 0 ? a / 2 : -((1 - a) / 2); };
            for (const auto& h : z1.ball(4))
                psi.values.emplace(h, GroupElement::lattice({fl(h.coords()[0] + shift) - fl(shift)}));
            return psi;
        };
        const TruncatedMapSpace space(z1, z1, 4, 1, 2.0, {table(0), table(1)});
        const auto v = check_fundamental_domain(space, 1);
        out.require(!v.pass && !v.witnesses.empty(), "fundamental domain catches a non-injective map");
    }
    // Bijectivity: rounding (not flooring) a rotation collides on the box.
    {
        const double c = std::cos(0.6);
        const double s = std::sin(0.6);
        const auto rounded = [&](const LatticeVector& v) {
            const double x = static_cast<double>(v[0]);
            const double y = static_cast<double>(v[1]);
            return LatticeVector{std::llround(c * x - s * y), std::llround(s * x + c * y)};
        };
        const auto v = injectivity_check_on_box(rounded, 2, 6);
        bool genuine = !v.witnesses.empty();
        if (genuine) {
            const auto& w = v.witnesses.front();
            const auto a = w["first"].get<LatticeVector>();
            const auto b = w["second"].get<LatticeVector>();
            genuine = a != b && rounded(a) == rounded(b);
        }
        out.require(!v.pass && genuine, "injectivity catches a rounded rotation");
    }
    // det ±1: diag(2, 1).
    {
        RealMatrix D(2, 2);
        D << 2, 0, 0, 1;
        const auto v = check_det_pm1(D, 1e-6);
        out.require(!v.pass && !v.witnesses.empty(), "det check rejects diag(2,1)");
    }
    // Multiplicativity: corrupted Λ² block.
    {
        RealMatrix M(3, 3);
        M << 1, 0.5, 0, 0, 1, -1.5, 0.25, 0, 1;
        auto map = induced_map(M);
        map.degree[2](1, 2) += 0.125;
        const auto v = multiplicativity_check(map, 1e-12);
        out.require(!v.pass && !v.witnesses.empty(), "multiplicativity catches a corrupted exterior square");
    }
    out.detail << "cocycle identity, fundamental domain, bijectivity, det +-1, multiplicativity each fail with a "
                  "witness on corrupted input";
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, Criterion>> criteria{
        {"realization recovery", realization_recovery},
        {"decomposition reconstruction", decomposition_reconstruction},
        {"Gromov battery", gromov_battery},
        {"odometer example", odometer_example},
        {"full-group algebra", full_group_algebra},
        {"word metrics", word_metrics},
        {"functoriality", functoriality},
        {"negative controls", negative_controls},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, run] : criteria) {
        ++index;
        Outcome out;
        const auto start = std::chrono::steady_clock::now();
        try {
            run(out);
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail << " [exception: " << e.what() << "]";
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!out.pass)
            ++failures;
        std::printf("%s %d %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", index, name, out.detail.str().c_str(),
                    seconds);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
