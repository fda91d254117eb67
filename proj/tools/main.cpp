#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "oelab/experiments.hpp"

int main(int argc, char** argv)
{
    using oelab::cli::ExperimentConfig;

    CLI::App app{"Orbit-equivalence lab: realization, Gromov construction, odometers, psi1 functoriality"};
    app.require_subcommand(1);
    ExperimentConfig config;

    auto add_common = [&config](CLI::App* sub) {
        sub->add_option("--matrix", config.matrix, "Matrix, rows split by ';', e.g. \"1 0.5; 0 1\"");
        sub->add_option("--p", config.p, "Odometer base")->check(CLI::Range(2, 255));
        sub->add_option("--depth", config.depth, "Odometer truncation depth N")->check(CLI::PositiveNumber);
        sub->add_option("--radius", config.radius, "Domain radius R");
        sub->add_option("--translate-radius", config.translate_radius, "Translate radius R_t");
        sub->add_option("--window", config.window, "Window radius W");
        sub->add_option("--n", config.n, "Growth scale n for psi1");
        sub->add_option("--samples", config.samples, "Sample points for psi1");
        sub->add_option("--tol", config.tol, "Decomposition tolerance");
        sub->add_option("--seed", config.seed, "Random seed");
        sub->add_option("--out", config.out, "Write the JSON report to this file");
        sub->add_flag("--json", config.json, "Print the JSON report instead of a summary");
    };

    auto* realize = app.add_subcommand("realize", "Realize a det +-1 matrix and recover it from the cocycle");
    auto* gromov = app.add_subcommand("gromov-check", "Truncated Gromov construction and its checks");
    auto* odometer = app.add_subcommand("odometer", "Matrix actions on the p-adic odometer");
    auto* functoriality = app.add_subcommand("psi-functoriality", "psi1 of a composite morphism");
    for (auto* sub : {realize, gromov, odometer, functoriality})
        add_common(sub);
    gromov->add_option("--corrupt", config.corrupt, "Overwrite one table entry (\"alpha\")");
    functoriality->add_option("--matrix-b", config.matrix_b, "Second matrix; the composite is B after A");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : oelab::cli::configuration_error;
    }
    for (auto* sub : app.get_subcommands())
        config.command = sub->get_name();

    const auto result = oelab::cli::run(config);
    const auto text = result.report.dump(2);
    if (!config.out.empty()) {
        std::ofstream file(config.out);
        if (!file) {
            std::cerr << "cannot write " << config.out << "\n";
            return oelab::cli::configuration_error;
        }
        file << text << "\n";
    }
    if (config.json)
        std::cout << text << "\n";
    else
        std::cout << oelab::cli::summarize(result.report);
    return result.exit_code;
}
