#include <random>
#include <set>

#include "doctest.h"
#include "oelab/errors.hpp"
#include "oelab/odometer.hpp"

using namespace oelab;

namespace {

DigitPoint pt(std::initializer_list<const char*> strings)
{
    DigitPoint x;
    for (const char* s : strings)
        x.digits.push_back(digits_from_string(s));
    return x;
}

IntMatrix mat2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d)
{
    IntMatrix A(2, 2);
    A << a, b, c, d;
    return A;
}

Cylinder cyl(std::initializer_list<const char*> prefixes)
{
    Cylinder c;
    for (const char* s : prefixes)
        c.prefixes.push_back(digits_from_string(s));
    return c;
}

std::int64_t mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

DigitPoint random_point(std::mt19937_64& rng, const OdometerSpace& space)
{
    std::uniform_int_distribution<std::uint64_t> pick(0, space.point_count() - 1);
    return point_from_index(pick(rng), space);
}

} // namespace

TEST_CASE("odometer_add with carries")
{
    const auto s2 = OdometerSpace::uniform(1, 2, 3);
    CHECK(odometer_add(pt({"111"}), std::vector<std::int64_t>{1}, s2) == pt({"000"}));
    const auto s3 = OdometerSpace::uniform(1, 3, 4);
    CHECK(odometer_add(pt({"2000"}), std::vector<std::int64_t>{1}, s3) == pt({"0100"}));
    CHECK(odometer_add(pt({"2101"}), std::vector<std::int64_t>{0}, s3) == pt({"2101"}));
    CHECK(odometer_add(pt({"0000"}), std::vector<std::int64_t>{-1}, s3) == pt({"2222"}));
}

TEST_CASE("odometer_add agrees with integer arithmetic mod p^N")
{
    const OdometerSpace space({2, 3}, 4);
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::int64_t> shift(-200, 200);
    for (int trial = 0; trial < 200; ++trial) {
        const auto x = random_point(rng, space);
        const std::vector<std::int64_t> v{shift(rng), shift(rng)};
        const auto vals = point_values(x, space);
        const auto y = point_values(odometer_add(x, v, space), space);
        CHECK(static_cast<std::int64_t>(y[0]) == mod(static_cast<std::int64_t>(vals[0]) + v[0], 16));
        CHECK(static_cast<std::int64_t>(y[1]) == mod(static_cast<std::int64_t>(vals[1]) + v[1], 81));
    }
}

TEST_CASE("action law on the ball of radius 3")
{
    const auto space = OdometerSpace::uniform(2, 3, 4);
    const auto ball = WordMetric::standard(Group::lattice(2)).ball(3);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const auto x = random_point(rng, space);
        for (const auto& u : ball)
            for (const auto& v : ball) {
                const auto uv = (u * v).coords();
                CHECK(odometer_add(odometer_add(x, u.coords(), space), v.coords(), space) ==
                      odometer_add(x, uv, space));
            }
    }
}

TEST_CASE("point validation and dimension errors")
{
    const auto space = OdometerSpace::uniform(1, 3, 2);
    CHECK_THROWS_AS(validate_point(pt({"3"}), space), PreconditionError);
    CHECK_THROWS_AS(validate_point(pt({"0"}), space), PreconditionError);
    CHECK_THROWS_AS(odometer_add(pt({"00"}), std::vector<std::int64_t>{1, 1}, space), DimensionMismatch);
    CHECK_THROWS_AS(OdometerSpace({1}, 2), PreconditionError);
    CHECK_THROWS_AS(OdometerSpace({2}, 0), PreconditionError);
}

TEST_CASE("Haar measure")
{
    const auto space = OdometerSpace::uniform(2, 3, 4);
    CHECK(haar_measure(ClopenSet::whole(space), space) == 1);
    CHECK(haar_measure(cyl({"01", "22"}), space) == Rational(1, 81));
    const ClopenSet two({cyl({"0", ""}), cyl({"1", "2"})});
    CHECK(haar_measure(two, space) == Rational(1, 3) + Rational(1, 9));
    CHECK(to_string(haar_measure(two, space)) == "4/9");
    CHECK_THROWS_AS(ClopenSet({cyl({"0", ""}), cyl({"01", "1"})}), PreconditionError);
}

TEST_CASE("measure is invariant under translation")
{
    const auto space = OdometerSpace::uniform(2, 2, 3);
    const auto ball = WordMetric::standard(Group::lattice(2)).ball(3);
    const OdometerSpace depth2({2, 2}, 2);
    for (std::uint64_t i = 0; i < depth2.point_count(); ++i) {
        const auto c = cylinder_of(point_from_index(i, depth2), 2);
        for (const auto& g : ball) {
            const auto moved = translate(c, g.coords(), space);
            CHECK(haar_measure(moved, space) == haar_measure(c, space));
        }
    }
}

TEST_CASE("complement")
{
    const auto space = OdometerSpace::uniform(2, 3, 3);
    const ClopenSet u({cyl({"01", "2"})});
    const auto rest = complement(u, space);
    CHECK_FALSE(intersects(u, rest));
    CHECK(haar_measure(u, space) + haar_measure(rest, space) == 1);
    CHECK(complement(ClopenSet::whole(space), space).empty());
}

TEST_CASE("refine_common")
{
    const auto space = OdometerSpace::uniform(2, 2, 3);
    const Partition whole{ClopenSet::whole(space)};
    CHECK(refine_common({whole, whole}, space) == whole);

    const Partition first{ClopenSet({cyl({"0", ""})}), ClopenSet({cyl({"1", ""})})};
    const Partition second{ClopenSet({cyl({"", "0"})}), ClopenSet({cyl({"", "1"})})};
    const auto both = refine_common({first, second}, space);
    REQUIRE(both.size() == 4);
    for (const auto& piece : both)
        CHECK(haar_measure(piece, space) == Rational(1, 4));
    auto sorted_first = first;
    std::sort(sorted_first.begin(), sorted_first.end());
    CHECK(refine_common({first, first}, space) == sorted_first);

    const Partition half{ClopenSet({cyl({"0", ""})})};
    CHECK_THROWS_AS(refine_common({half}, space), PreconditionError);
}

TEST_CASE("matrix_act")
{
    const auto s = OdometerSpace::uniform(2, 2, 3);
    const auto shear = mat2(1, 1, 0, 1);
    CHECK(matrix_act(IntMatrix::Identity(2, 2), pt({"100", "010"}), s) == pt({"100", "010"}));
    CHECK(matrix_act(shear, pt({"100", "010"}), s) == pt({"110", "010"}));
    CHECK_THROWS_AS(matrix_act(mat2(2, 0, 0, 1), pt({"100", "010"}), s), PreconditionError);
    const OdometerSpace mixed({2, 3}, 3);
    CHECK_THROWS_AS(matrix_act(shear, zero_point(mixed), mixed), PreconditionError);
}

TEST_CASE("matrix_act is equivariant and composes")
{
    const auto space = OdometerSpace::uniform(2, 3, 4);
    const std::vector<IntMatrix> mats{mat2(1, 1, 0, 1), mat2(0, -1, 1, 0), mat2(2, 1, 1, 1), mat2(1, 0, -3, 1)};
    const auto ball = WordMetric::standard(Group::lattice(2)).ball(3);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto x = random_point(rng, space);
        const auto& A = mats[static_cast<std::size_t>(trial) % mats.size()];
        const auto& B = mats[static_cast<std::size_t>(trial / 4) % mats.size()];
        for (const auto& g : ball) {
            const auto Ag = oelab::apply(A, g.coords());
            CHECK(matrix_act(A, odometer_add(x, g.coords(), space), space) ==
                  odometer_add(matrix_act(A, x, space), Ag, space));
        }
        IntMatrix AB = A * B;
        CHECK(matrix_act(AB, x, space) == matrix_act(A, matrix_act(B, x, space), space));
    }
}

TEST_CASE("bijectivity at depth N")
{
    CHECK(bijectivity_check_depthN(IntMatrix::Identity(2, 2), OdometerSpace::uniform(2, 2, 3)).pass);
    const auto space = OdometerSpace::uniform(2, 3, 4);
    const auto v = bijectivity_check_depthN(mat2(1, 1, 0, 1), space);
    CHECK(v.pass);
    // Independent count of the image.
    std::set<DigitPoint> image;
    for (std::uint64_t i = 0; i < space.point_count(); ++i)
        image.insert(matrix_act(mat2(1, 1, 0, 1), point_from_index(i, space), space));
    CHECK(image.size() == 6561);
    CHECK_THROWS_AS(bijectivity_check_depthN(mat2(2, 0, 0, 1), space), PreconditionError);
}

TEST_CASE("minimality witness")
{
    const auto one = minimality_witness(OdometerSpace::uniform(1, 2, 3), 3);
    CHECK(one.pass);
    CHECK(one.info["cylinders"] == 8);
    CHECK(one.info["steps"] == 8);
    const auto two = minimality_witness(OdometerSpace::uniform(2, 3, 4), 2);
    CHECK(two.pass);
    CHECK(two.info["visited"] == 81);
    CHECK(minimality_witness(OdometerSpace::uniform(2, 3, 4), 0).pass);
    CHECK_THROWS_AS(minimality_witness(OdometerSpace::uniform(1, 2, 3), 4), PreconditionError);
}

TEST_CASE("wandering check")
{
    const auto s1 = OdometerSpace::uniform(1, 2, 4);
    const auto whole = wandering_check(ClopenSet::whole(s1), 1, s1);
    REQUIRE(whole.witness.has_value());
    CHECK(std::llabs((*whole.witness)[0]) == 1);

    const auto even = wandering_check(ClopenSet({cyl({"0"})}), 3, s1);
    REQUIRE(even.witness.has_value());
    CHECK(std::llabs((*even.witness)[0]) == 2);

    const auto deep = wandering_check(ClopenSet({cyl({"0110"})}), 5, s1);
    CHECK_FALSE(deep.witness.has_value());
    CHECK(deep.searched == 10);
    const auto far = wandering_check(ClopenSet({cyl({"0110"})}), 16, s1);
    REQUIRE(far.witness.has_value());
    CHECK(std::llabs((*far.witness)[0]) == 16);

    CHECK_THROWS_AS(wandering_check(ClopenSet(), 3, s1), PreconditionError);
}

TEST_CASE("serialization")
{
    nlohmann::json j = pt({"201", "010"});
    CHECK(j == nlohmann::json::array({"201", "010"}));
    CHECK(digits_to_string(digits_from_string("0120")) == "0120");
}
