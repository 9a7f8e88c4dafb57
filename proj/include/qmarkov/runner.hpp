#pragma once

#include <string>

#include <json.hpp>

#include "qmarkov/config.hpp"

namespace qmarkov {

struct RunResult {
    int exit_code = 0;
    nlohmann::json summary;   // deterministic: no timings, no absolute paths
    nlohmann::json timings;   // wall-clock phases, written to a sidecar file
};

RunResult run_ode(const ExperimentConfig& cfg);
RunResult run_mc(const ExperimentConfig& cfg);
RunResult run_compare(const ExperimentConfig& cfg);
RunResult run_laplace(const ExperimentConfig& cfg);
RunResult run_check(const ExperimentConfig& cfg);

// Dispatches one subcommand, writes <out>/summary.json and <out>/timings.json,
// echoes timing to stderr, and returns the process exit code (0 success,
// 3 when a comparison or invariant check fails; validation and numerical
// errors propagate as exceptions for the CLI to map to codes 1 and 2).
int run_command(const std::string& command, const ExperimentConfig& cfg);

}  // namespace qmarkov
