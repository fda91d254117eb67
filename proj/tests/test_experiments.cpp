#include "doctest.h"
#include "oelab/experiments.hpp"

using namespace oelab::cli;

namespace {

ExperimentConfig config(const char* command, const char* matrix)
{
    ExperimentConfig c;
    c.command = command;
    c.matrix = matrix;
    return c;
}

bool all_checks_pass(const nlohmann::json& report)
{
    for (const auto& c : report.at("checks"))
        if (!c.at("pass").get<bool>())
            return false;
    return true;
}

} // namespace

TEST_CASE("realize")
{
    auto id = run(config("realize", "1 0; 0 1"));
    CHECK(id.exit_code == all_pass);
    CHECK(id.report["schema_version"] == schema_version);
    CHECK(id.report["invariant"]["matrix"] == nlohmann::json::parse("[[1.0,0.0],[0.0,1.0]]"));

    auto shear = config("realize", "1 0.5; 0 1");
    shear.n = 1024;
    const auto r = run(shear);
    CHECK(r.exit_code == all_pass);
    CHECK(all_checks_pass(r.report));
    const double C = r.report["C"].get<double>();
    const auto& m = r.report["invariant"]["matrix"];
    CHECK(std::abs(m[0][1].get<double>() - 0.5) <= C / 1024);

    const auto det2 = run(config("realize", "2 0; 0 1"));
    CHECK(det2.exit_code == configuration_error);
    CHECK(det2.report["error"]["type"] == "precondition");
    CHECK(det2.report["error"].contains("stage"));
}

TEST_CASE("every check carries an anchor")
{
    const auto r = run(config("odometer", "1 1; 0 1"));
    REQUIRE(r.report["checks"].size() > 0);
    for (const auto& c : r.report["checks"]) {
        CHECK(c.contains("anchor"));
        CHECK_FALSE(c["anchor"].get<std::string>().empty());
    }
}

TEST_CASE("gromov-check")
{
    auto c = config("gromov-check", "1 0.5; 0 1");
    c.radius = 4;
    c.translate_radius = 3;
    CHECK(run(c).exit_code == all_pass);
    CHECK(run(config("gromov-check", "1 0; 0 1")).exit_code == all_pass);

    c.corrupt = "alpha";
    const auto bad = run(c);
    CHECK(bad.exit_code == verification_failure);
    bool identity_failed = false;
    for (const auto& check : bad.report["checks"])
        if (check["check"] == "cocycle identity")
            identity_failed = !check["pass"].get<bool>() && !check["witnesses"].empty();
    CHECK(identity_failed);

    c.corrupt = "beta";
    CHECK(run(c).exit_code == configuration_error);
    auto wide = config("gromov-check", "1 0.5; 0 1");
    wide.radius = 3;
    wide.window = 2;
    CHECK(run(wide).exit_code == configuration_error);
}

TEST_CASE("odometer")
{
    auto c = config("odometer", "1 1; 0 1");
    const auto r = run(c);
    CHECK(r.exit_code == all_pass);
    CHECK(all_checks_pass(r.report));

    auto small = config("odometer", "1 0; 0 1");
    small.p = 2;
    small.depth = 3;
    CHECK(run(small).exit_code == all_pass);

    CHECK(run(config("odometer", "1 1; 1 1")).exit_code == configuration_error);
    CHECK(run(config("odometer", "1 0.5; 0 1")).exit_code == configuration_error);
}

TEST_CASE("psi-functoriality")
{
    auto id = config("psi-functoriality", "1 0; 0 1");
    CHECK(run(id).exit_code == all_pass);

    auto ints = config("psi-functoriality", "1 1; 0 1");
    ints.matrix_b = "0 -1; 1 0";
    const auto r = run(ints);
    CHECK(r.exit_code == all_pass);
    CHECK(r.report["mode"] == "odometer constant cocycles");

    auto shears = config("psi-functoriality", "1 0.5; 0 1");
    shears.matrix_b = "1 0; -1.25 1";
    CHECK(run(shears).exit_code == all_pass);

    auto mismatch = config("psi-functoriality", "1 0; 0 1");
    mismatch.matrix_b = "1 0 0; 0 1 0; 0 0 1";
    CHECK(run(mismatch).exit_code == configuration_error);
}

TEST_CASE("configuration errors")
{
    CHECK(run(config("nonsense", "1")).exit_code == configuration_error);
    CHECK(run(config("realize", "")).exit_code == configuration_error);
    CHECK(run(config("realize", "1 2; 3")).exit_code == configuration_error);
    auto negative = config("realize", "1 0; 0 1");
    negative.radius = -1;
    CHECK(run(negative).exit_code == configuration_error);
    auto tol = config("realize", "1 0; 0 1");
    tol.tol = 0.0;
    CHECK(run(tol).exit_code == configuration_error);
}

TEST_CASE("fixed seed gives byte-identical reports")
{
    auto c = config("realize", "1 0.3; 0 1");
    c.samples = 16;
    c.seed = 42;
    CHECK(run(c).report.dump() == run(c).report.dump());
    auto g = config("gromov-check", "1 0.5; 0 1");
    g.radius = 4;
    g.translate_radius = 2;
    CHECK(run(g).report.dump() == run(g).report.dump());
}

TEST_CASE("summary lists one line per check")
{
    const auto r = run(config("realize", "1 0; 0 1"));
    const auto text = summarize(r.report);
    CHECK(text.find("PASS") != std::string::npos);
    CHECK(text.find("FAIL") == std::string::npos);
    const auto err = summarize(run(config("realize", "2 0; 0 1")).report);
    CHECK(err.find("ERROR") != std::string::npos);
}
