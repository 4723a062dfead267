#pragma once

// Routers exchanging energy through diffusive coupling:
//
//   dx_i/dt = f(x_i, u_i) + g * sum_{j in N_i} (x_j - x_i) + sqrt(2 D_i) xi_i(t)
//
// Each node runs its own estimate -> optimize -> apply loop and draws noise
// from its own stream (seed, node index), so switching the coupling on or
// off never changes the draws. Updates are synchronous: all coupling terms
// are evaluated on the pre-step state.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ratchet/router_sde.hpp"

namespace ratchet {

class Topology {
public:
    using Edge = std::pair<std::size_t, std::size_t>;

    /// Validates endpoints, self-loops and duplicates (in either orientation).
    Topology(std::size_t n_nodes, std::vector<Edge> edges);

    static Topology line(std::size_t n);
    static Topology ring(std::size_t n);
    static Topology star(std::size_t n);  // node 0 is the hub
    static Topology complete(std::size_t n);
    /// Parses `i j` pairs, one per line, 0-indexed; `#` starts a comment.
    static Topology parse_edge_list(std::size_t n_nodes, const std::string& text);
    static Topology from_edge_file(std::size_t n_nodes, const std::string& path);

    [[nodiscard]] std::size_t size() const noexcept { return adjacency_.size(); }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const std::vector<std::size_t>& neighbors(std::size_t i) const {
        return adjacency_.at(i);
    }

private:
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> adjacency_;
};

struct NetworkSpec {
    Topology topology;
    double g = 0.0;
    /// One entry shared by all nodes, or one per node.
    std::vector<RouterParams> node_params;
    std::vector<NoiseSchedule> schedules;  // one per node

    void validate() const;
    [[nodiscard]] std::size_t size() const noexcept { return topology.size(); }
    [[nodiscard]] const RouterParams& params(std::size_t i) const {
        return node_params.size() == 1 ? node_params.front() : node_params.at(i);
    }
};

struct NetworkState {
    std::vector<RouterState> nodes;
    double t = 0.0;
};

[[nodiscard]] NetworkState make_network_state(const NetworkSpec& spec, const SimulationConfig& sim,
                                              const EstimatorConfig& est);

/// g * sum_{j in N_i} (x_j - x_i). Throws std::out_of_range for a bad index.
[[nodiscard]] double coupling_term(const NetworkState& state, const NetworkSpec& spec,
                                   std::size_t i);

/// One synchronous Euler-Maruyama step for every node. `rngs[i]` feeds node i.
void network_step(NetworkState& state, const NetworkSpec& spec, double dt,
                  std::vector<NormalSource>& rngs, const SimulationConfig& sim);

/// Per-node streams for a run: node i draws from (seed, i).
[[nodiscard]] std::vector<NormalSource> node_streams(std::uint64_t seed, std::size_t n);

/// Called before every step (after the control tick) with the step index.
using NetworkObserver = std::function<void(std::size_t step, const NetworkState&)>;

/// Closed-loop network integration; `observer` may be empty.
void simulate_network(const NetworkSpec& spec, const EstimatorConfig& est,
                      const SimulationConfig& sim, std::uint64_t seed,
                      const NetworkObserver& observer);

/// Per-node trajectories, records every `sim.record_every` steps including
/// the coupling flux into each node.
[[nodiscard]] std::vector<std::vector<TrajectoryRecord>> run_network(const NetworkSpec& spec,
                                                                     const EstimatorConfig& est,
                                                                     const SimulationConfig& sim,
                                                                     std::uint64_t seed);

/// One node has its noise raised to a trial level over [burst_start, burst_end);
/// every other node (and that node outside the burst) sees `base_noise`.
struct BurstScenario {
    std::size_t node = 0;
    double base_noise = 0.5;
    double p_mean = 1.0;
    double burst_start = 50.0;
    double burst_end = 350.0;
    /// Time after burst onset excluded from the indicator; negative means one
    /// estimator window span.
    double settle = -1.0;
    /// Burst counts as abandoned when the node's mean u* falls below this.
    double u_floor = 1e-3;

    void validate(std::size_t n_nodes, double t_end) const;
    [[nodiscard]] double settle_time(const EstimatorConfig& est) const;
};

/// Piecewise schedules for every node with the designated node at `level`
/// during the burst.
[[nodiscard]] std::vector<NoiseSchedule> burst_schedules(std::size_t n_nodes,
                                                         const BurstScenario& scenario,
                                                         double level);

/// Time-averaged u* of the designated node over the evaluation window.
[[nodiscard]] double burst_mean_control(const NetworkSpec& spec, const BurstScenario& scenario,
                                        double level, const EstimatorConfig& est,
                                        const SimulationConfig& sim, std::uint64_t seed);

struct NetworkCriticalSpec {
    BurstScenario scenario{};
    double d_lo = 1.0;
    double d_hi = 8.0;
    double tol = 0.02;
    std::size_t n_seeds = 8;

    void validate() const;
};

struct NetworkCriticalResult {
    double median = 0.0;
    std::vector<double> per_seed;  // seed base + k
};

/// Bisection on burst level for one seed. Throws NotBracketedError.
[[nodiscard]] double network_critical_single_seed(const NetworkSpec& spec,
                                                  const NetworkCriticalSpec& crit,
                                                  const EstimatorConfig& est,
                                                  const SimulationConfig& sim,
                                                  std::uint64_t seed);

/// Median over seeds base_seed, base_seed + 1, ... of the per-seed critical
/// burst level. The schedules in `spec` are replaced by the burst scenario.
[[nodiscard]] NetworkCriticalResult network_critical(const NetworkSpec& spec,
                                                     const NetworkCriticalSpec& crit,
                                                     const EstimatorConfig& est,
                                                     const SimulationConfig& sim,
                                                     std::uint64_t base_seed,
                                                     std::size_t jobs = 1);

/// Reference scenario settings: five-node ring, coarse buffer sampling so the
/// estimator sees coupling-smoothed fluctuations, and a buffer wide enough
/// that clamping never engages.
[[nodiscard]] SimulationConfig network_reference_simulation();
[[nodiscard]] EstimatorConfig network_reference_estimator();

}  // namespace ratchet
