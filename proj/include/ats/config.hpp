#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ats/sde.hpp"

namespace ats::config {

struct CurveGridConfig {
    double t_max = 10.0;
    Eigen::Index nodes = 512;
};

struct SimulationConfig {
    double horizon = 1.0;
    Eigen::Index steps = 1024;
    Eigen::Index paths = 1024;
    Eigen::Index store_stride = 1;  // store every k-th step; must divide steps
};

struct ValidationConfig {
    double maturity = 1.0;
    std::vector<double> checkpoints{0.25, 0.5, 0.75, 1.0};
    double x_max = 4.0;
    Eigen::Index x_nodes = 64;
    Eigen::Index v_nodes = 64;
    Eigen::Index paths = 200000;
    Eigen::Index steps = 1024;
};

struct PricingConfig {
    std::vector<double> maturities{1.0, 2.0, 5.0, 10.0};
    long long path = -1;  // -1 prices the ensemble average, otherwise a path index
};

struct OutputConfig {
    std::string dir = "out";
    std::string format = "csv";  // csv | json | bin, per command
};

// Versioned experiment description; JSON round-trips exactly and unknown
// fields are rejected everywhere.
struct ExperimentConfig {
    int version = 1;
    sde::ShortRateModel model;
    CurveGridConfig curve_grid;
    SimulationConfig simulation;
    ValidationConfig validation;
    PricingConfig pricing;
    std::uint64_t seed = 0;
    int threads = 1;
    OutputConfig output;

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    // Reads a config file; a run manifest (object with "tool" and "config")
    // is accepted and unwrapped, so manifests re-run directly.
    static ExperimentConfig load(const std::string& path);
};

}  // namespace ats::config
