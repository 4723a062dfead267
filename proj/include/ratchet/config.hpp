#pragma once

// Experiment configuration: JSON schema, defaulting and validation.
//
// Every object in the document is checked against its known keys, so typos
// fail loudly with the offending path. Missing keys take the defaults of the
// corresponding module structs. `to_json` emits the effective (fully
// defaulted) configuration; loading that document again yields an equal
// configuration.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ratchet/bifurcation.hpp"
#include "ratchet/network.hpp"
#include "ratchet/router_sde.hpp"
#include "ratchet/schedule.hpp"

namespace ratchet {

enum class ExperimentKind { single, sweep, critical, network, network_critical, landscape };

[[nodiscard]] const char* to_string(ExperimentKind kind) noexcept;
/// Throws ConfigError for unknown names.
[[nodiscard]] ExperimentKind parse_experiment_kind(const std::string& name,
                                                   const std::string& path = "experiment");

struct ScheduleConfig {
    NoiseSchedule::Kind kind = NoiseSchedule::Kind::pseudo_solar;
    double p_mean = 1.0;
    double noise = 1.0;
    std::vector<ScheduleSegment> segments;
    SolarConfig solar{};  // grid_dt and horizon follow the simulation section

    friend bool operator==(const ScheduleConfig&, const ScheduleConfig&) = default;
};

struct CriticalConfig {
    double d_lo = 1.0;
    double d_hi = 4.0;
    double tol = 1e-4;

    friend bool operator==(const CriticalConfig&, const CriticalConfig&) = default;
};

struct LandscapeConfig {
    std::vector<double> noise_values{0.5, 1.5, 2.5};
    std::size_t n_u = 1001;

    friend bool operator==(const LandscapeConfig&, const LandscapeConfig&) = default;
};

struct NetworkConfig {
    std::string topology = "ring";  // line | ring | star | complete | edges | edges_file
    std::size_t n_nodes = 5;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::string edges_file;
    double g = 0.5;
    BurstScenario burst{};
    double burst_level = 3.0;
    SimulationConfig simulation = network_reference_simulation();
    EstimatorConfig estimator = network_reference_estimator();

    [[nodiscard]] Topology build_topology() const;
};

struct NetworkCriticalConfig {
    double d_lo = 1.0;
    double d_hi = 8.0;
    double tol = 0.02;
    std::size_t n_seeds = 8;
    std::vector<double> g_values{0.0, 0.1, 0.5};

    friend bool operator==(const NetworkCriticalConfig&, const NetworkCriticalConfig&) = default;
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::sweep;
    std::uint64_t seed = 0;
    std::string output = "out";
    RouterParams params{};
    EstimatorConfig estimator{};
    SimulationConfig simulation{};
    ScheduleConfig schedule{};
    SweepSpec sweep{};  // sweep.params mirrors `params`
    CriticalConfig critical{};
    LandscapeConfig landscape{};
    NetworkConfig network{};
    NetworkCriticalConfig network_critical{};

    /// Full validation; throws ConfigError with a field path.
    void validate() const;
    /// Schedule for single-router runs, generated on the simulation grid.
    [[nodiscard]] NoiseSchedule build_schedule() const;
};

[[nodiscard]] ExperimentConfig parse_config(const nlohmann::json& doc);
/// Reads and parses a JSON file; a missing file is a ConfigError.
[[nodiscard]] ExperimentConfig load_config(const std::string& path);
[[nodiscard]] nlohmann::json to_json(const ExperimentConfig& config);
/// FNV-1a 64 of the canonical effective-config dump, as 16 hex digits.
[[nodiscard]] std::string config_hash(const ExperimentConfig& config);

}  // namespace ratchet
