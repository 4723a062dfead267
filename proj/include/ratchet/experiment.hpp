#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ratchet/config.hpp"

namespace ratchet {

inline constexpr const char* kToolVersion = "0.3.0";

struct LandscapePoint {
    double noise = 0.0;
    double u = 0.0;
    double weighted_gain = 0.0;  // alpha * G(u)
    double info_cost = 0.0;
    double entropy_penalty = 0.0;
    double j = 0.0;
};

/// J(u) and its components on an even u grid for each noise level.
[[nodiscard]] std::vector<LandscapePoint> landscape(const RouterParams& params,
                                                    const std::vector<double>& noise_values,
                                                    std::size_t n_u);

struct RunOutcome {
    std::vector<std::string> files;  // relative to the output directory
    std::string config_hash;
};

/// Runs the configured experiment and writes its CSV files, the effective
/// configuration and a manifest into `config.output`.
RunOutcome run_experiment(const ExperimentConfig& config, std::size_t jobs);

/// Worker count from --jobs, then RATCHET_GRID_JOBS, then the machine.
[[nodiscard]] std::size_t resolve_jobs(long long flag_value);

}  // namespace ratchet
