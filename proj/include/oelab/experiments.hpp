#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace oelab::cli {

inline constexpr int schema_version = 1;

enum ExitCode : int { all_pass = 0, verification_failure = 1, configuration_error = 2 };

struct ExperimentConfig {
    std::string command;
    std::string matrix;    // rows split by ';', entries by whitespace
    std::string matrix_b;  // second morphism for psi-functoriality
    int p = 3;
    int depth = 4;
    int radius = 6;
    int translate_radius = 6;
    int window = 2;
    int n = 1024;
    int samples = 256;
    double tol = 1e-9;
    std::uint64_t seed = 1;
    std::string corrupt;  // gromov-check: "alpha" overwrites one cocycle table entry
    std::string out;
    bool json = false;
};

nlohmann::json config_to_json(const ExperimentConfig& config);

struct RunResult {
    nlohmann::json report;
    int exit_code = all_pass;
};

RunResult cmd_realize(const ExperimentConfig& config);
RunResult cmd_gromov_check(const ExperimentConfig& config);
RunResult cmd_odometer(const ExperimentConfig& config);
RunResult cmd_psi_functoriality(const ExperimentConfig& config);

/// Dispatches on config.command; unknown commands are configuration errors.
RunResult run(const ExperimentConfig& config);

/// One line per check, for terminals.
std::string summarize(const nlohmann::json& report);

} // namespace oelab::cli
