#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qmarkov/master.hpp"
#include "qmarkov/trajectory.hpp"

namespace qmarkov {

// Parsed and validated experiment description. Matrices arrive as flattened
// row-major arrays of [re, im] pairs; every structural violation is reported
// with the config path of the offending field.
struct ExperimentConfig {
    QuantumModel model;
    nlohmann::json model_echo;  // resolved model block, echoed into summaries

    std::vector<Matrix> rho0;   // one density matrix per environment start state
    RealVector initial_dist;    // mixing weights for observable output

    std::vector<double> grid;
    double grid_start = 0.0;
    double grid_stop = 0.0;
    int grid_steps = 0;

    long n_samples = 1000;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, Matrix>> observables;  // name-sorted
    std::vector<Complex> s_values;  // Laplace evaluation points
    int quad_steps = 2048;

    std::string out_dir = "out";
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

}  // namespace qmarkov
