#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bivruin/ladder_wh.hpp"
#include "bivruin/simulator.hpp"

namespace bivruin {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepBlock {
    std::vector<double> s1;  // transform sweep grid (empty: no sweep)
    std::vector<double> s2;
    std::vector<std::pair<double, double>> points;  // (u, v) survival points
    bool overlay = false;  // add direct-simulation columns to transform sweeps
};

struct WhBlock {
    std::size_t n_samples = 10'000;
    double rejection_factor = 1e4;
    double w_max = 5.0;  // real grid for factor curves, identity grid on i*(0, w_max]
    int w_count = 51;
};

struct OutputBlock {
    std::string dir = "out";
    std::vector<std::string> formats = {"csv"};
};

// One declarative experiment: the model, simulation sizes, factor-estimation
// sizes, the argument sweep and where results go. Unknown keys are rejected.
struct ExperimentConfig {
    CoverageModel model;
    SimConfig sim;
    WhBlock wh;
    SweepBlock sweep;
    OutputBlock output;
    std::string config_hash;  // FNV-1a of the raw config bytes
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& origin);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace bivruin
