#include "ratchet/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ratchet/errors.hpp"
#include "ratchet/parallel.hpp"

namespace ratchet {

Topology::Topology(std::size_t n_nodes, std::vector<Edge> edges)
    : edges_(std::move(edges)), adjacency_(n_nodes) {
    if (n_nodes < 1) throw ConfigError("must be >= 1", "network.n_nodes");
    std::set<Edge> seen;
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        const auto [i, j] = edges_[k];
        const std::string path = "network.edges[" + std::to_string(k) + "]";
        if (i >= n_nodes || j >= n_nodes) throw ConfigError("endpoint out of range", path);
        if (i == j) throw ConfigError("self-loop", path);
        if (!seen.insert({std::min(i, j), std::max(i, j)}).second)
            throw ConfigError("duplicate edge", path);
        adjacency_[i].push_back(j);
        adjacency_[j].push_back(i);
    }
}

Topology Topology::line(std::size_t n) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return {n, std::move(e)};
}

Topology Topology::ring(std::size_t n) {
    if (n < 3) return line(n);
    std::vector<Edge> e;
    for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return {n, std::move(e)};
}

Topology Topology::star(std::size_t n) {
    std::vector<Edge> e;
    for (std::size_t i = 1; i < n; ++i) e.emplace_back(0, i);
    return {n, std::move(e)};
}

Topology Topology::complete(std::size_t n) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return {n, std::move(e)};
}

Topology Topology::parse_edge_list(std::size_t n_nodes, const std::string& text) {
    std::vector<Edge> edges;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        long long i = 0;
        long long j = 0;
        if (!(fields >> i)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw ConfigError("expected `i j` on line " + std::to_string(line_no), "network.edges_file");
        }
        std::string rest;
        if (!(fields >> j) || (fields >> rest) || i < 0 || j < 0) {
            throw ConfigError("expected two non-negative indices on line " + std::to_string(line_no),
                              "network.edges_file");
        }
        edges.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
    return {n_nodes, std::move(edges)};
}

Topology Topology::from_edge_file(std::size_t n_nodes, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read edge list '" + path + "'", "network.edges_file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_edge_list(n_nodes, buf.str());
}

void NetworkSpec::validate() const {
    if (!std::isfinite(g) || g < 0.0) throw ConfigError("must be finite and >= 0", "network.g");
    if (node_params.size() != 1 && node_params.size() != size())
        throw ConfigError("need one shared parameter set or one per node", "network.node_params");
    for (const auto& p : node_params) p.validate();
    if (schedules.size() != size())
        throw ConfigError("need one schedule per node", "network.schedules");
}

NetworkState make_network_state(const NetworkSpec& spec, const SimulationConfig& sim,
                                const EstimatorConfig& est) {
    NetworkState state;
    state.nodes.reserve(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) state.nodes.push_back(make_router_state(sim, est));
    return state;
}

double coupling_term(const NetworkState& state, const NetworkSpec& spec, std::size_t i) {
    if (i >= spec.size() || i >= state.nodes.size())
        throw std::out_of_range("node index " + std::to_string(i) + " out of range");
    const double xi = state.nodes[i].x;
    double sum = 0.0;
    for (std::size_t j : spec.topology.neighbors(i)) sum += state.nodes[j].x - xi;
    return spec.g * sum;
}

std::vector<NormalSource> node_streams(std::uint64_t seed, std::size_t n) {
    std::vector<NormalSource> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.emplace_back(seed, i);
    return out;
}

void network_step(NetworkState& state, const NetworkSpec& spec, double dt,
                  std::vector<NormalSource>& rngs, const SimulationConfig& sim) {
    const std::size_t n = spec.size();
    thread_local std::vector<double> next;
    next.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& node = state.nodes[i];
        const auto& schedule = spec.schedules[i];
        const auto& params = spec.params(i);
        const double rate = drift(node.x, node.u, schedule.p_mean(state.t), node.d_hat, params,
                                  sim.p_load) +
                            coupling_term(state, spec, i);
        const double gate = sim.gate_noise ? node.u : 1.0;
        const double amp = gate * std::sqrt(2.0 * schedule.noise(state.t) * dt);
        next[i] = advance_buffer(node.x, rate, amp, rngs[i](), dt, sim.x_max);
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto& node = state.nodes[i];
        node.x = next[i];
        if (++node.since_sample == node.sample_stride) {
            node.since_sample = 0;
            node.estimator.push_sample(node.x);
        }
    }
    state.t += dt;
}

void simulate_network(const NetworkSpec& spec, const EstimatorConfig& est,
                      const SimulationConfig& sim, std::uint64_t seed,
                      const NetworkObserver& observer) {
    spec.validate();
    est.validate();
    sim.validate();
    for (std::size_t i = 0; i < spec.size(); ++i) {
        if (spec.schedules[i].horizon() < sim.t_end)
            throw ConfigError("schedule horizon is shorter than the run",
                              "network.schedules[" + std::to_string(i) + "]");
    }
    NetworkState state = make_network_state(spec, sim, est);
    auto rngs = node_streams(seed, spec.size());
    const std::size_t n = step_count(sim);
    for (std::size_t k = 0; k < n; ++k) {
        // Same time grid as run_single so g = 0 reproduces it bit for bit.
        state.t = static_cast<double>(k) * sim.dt;
        if (k % sim.control_interval == 0) {
            for (std::size_t i = 0; i < spec.size(); ++i)
                update_control(state.nodes[i], spec.params(i), sim);
        }
        if (observer) observer(k, state);
        network_step(state, spec, sim.dt, rngs, sim);
    }
    state.t = static_cast<double>(n) * sim.dt;
    if (observer) observer(n, state);
}

std::vector<std::vector<TrajectoryRecord>> run_network(const NetworkSpec& spec,
                                                       const EstimatorConfig& est,
                                                       const SimulationConfig& sim,
                                                       std::uint64_t seed) {
    std::vector<std::vector<TrajectoryRecord>> out(spec.size());
    simulate_network(spec, est, sim, seed, [&](std::size_t k, const NetworkState& state) {
        if (k % sim.record_every != 0) return;
        for (std::size_t i = 0; i < spec.size(); ++i) {
            auto rec = make_record(state.nodes[i], state.t, spec.schedules[i], spec.params(i));
            rec.coupling_flux = coupling_term(state, spec, i);
            out[i].push_back(rec);
        }
    });
    return out;
}

void BurstScenario::validate(std::size_t n_nodes, double t_end) const {
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw ConfigError(what, std::string("network.burst.") + field);
    };
    require(node < n_nodes, "node", "must index a node");
    require(std::isfinite(base_noise) && base_noise >= 0.0, "base_noise", "must be >= 0");
    require(std::isfinite(p_mean) && p_mean >= 0.0, "p_mean", "must be >= 0");
    require(std::isfinite(burst_start) && burst_start >= 0.0, "burst_start", "must be >= 0");
    require(std::isfinite(burst_end) && burst_end > burst_start, "burst_end",
            "must exceed burst_start");
    require(burst_end <= t_end + 1e-9, "burst_end", "must not exceed the run length");
    require(std::isfinite(settle), "settle", "must be finite");
    require(std::isfinite(u_floor) && u_floor > 0.0, "u_floor", "must be > 0");
}

double BurstScenario::settle_time(const EstimatorConfig& est) const {
    return settle >= 0.0 ? settle : static_cast<double>(est.window_len) * est.dt;
}

std::vector<NoiseSchedule> burst_schedules(std::size_t n_nodes, const BurstScenario& scenario,
                                           double level) {
    std::vector<NoiseSchedule> out;
    out.reserve(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        if (i != scenario.node) {
            out.push_back(NoiseSchedule::constant(scenario.p_mean, scenario.base_noise));
            continue;
        }
        std::vector<ScheduleSegment> segs;
        if (scenario.burst_start > 0.0) segs.push_back({0.0, scenario.p_mean, scenario.base_noise});
        segs.push_back({scenario.burst_start, scenario.p_mean, level});
        segs.push_back({scenario.burst_end, scenario.p_mean, scenario.base_noise});
        out.push_back(NoiseSchedule::piecewise(std::move(segs)));
    }
    return out;
}

double burst_mean_control(const NetworkSpec& spec, const BurstScenario& scenario, double level,
                          const EstimatorConfig& est, const SimulationConfig& sim,
                          std::uint64_t seed) {
    scenario.validate(spec.size(), sim.t_end);
    NetworkSpec trial{spec.topology, spec.g, spec.node_params,
                      burst_schedules(spec.size(), scenario, level)};
    const double eval_start = scenario.burst_start + scenario.settle_time(est);
    if (!(eval_start < scenario.burst_end))
        throw ConfigError("settle time leaves no evaluation window", "network.burst.settle");
    double acc = 0.0;
    std::size_t count = 0;
    const std::size_t n = step_count(sim);
    simulate_network(trial, est, sim, seed, [&](std::size_t k, const NetworkState& state) {
        if (k == n) return;
        if (state.t >= eval_start && state.t < scenario.burst_end) {
            acc += state.nodes[scenario.node].u;
            ++count;
        }
    });
    return count == 0 ? 0.0 : acc / static_cast<double>(count);
}

void NetworkCriticalSpec::validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw ConfigError(what, std::string("network_critical.") + field);
    };
    require(std::isfinite(d_lo) && d_lo >= 0.0, "d_lo", "must be >= 0");
    require(std::isfinite(d_hi) && d_hi > d_lo, "d_hi", "must exceed d_lo");
    require(std::isfinite(tol) && tol > 0.0, "tol", "must be > 0");
    require(n_seeds >= 1, "n_seeds", "must be >= 1");
}

double network_critical_single_seed(const NetworkSpec& spec, const NetworkCriticalSpec& crit,
                                    const EstimatorConfig& est, const SimulationConfig& sim,
                                    std::uint64_t seed) {
    crit.validate();
    auto abandoned = [&](double level) {
        return burst_mean_control(spec, crit.scenario, level, est, sim, seed) <
               crit.scenario.u_floor;
    };
    if (abandoned(crit.d_lo) || !abandoned(crit.d_hi)) {
        throw NotBracketedError("burst abandonment is not bracketed by [" +
                                std::to_string(crit.d_lo) + ", " + std::to_string(crit.d_hi) +
                                "] for seed " + std::to_string(seed));
    }
    double a = crit.d_lo;
    double b = crit.d_hi;
    while (b - a > crit.tol) {
        const double mid = 0.5 * (a + b);
        (abandoned(mid) ? b : a) = mid;
    }
    return 0.5 * (a + b);
}

NetworkCriticalResult network_critical(const NetworkSpec& spec, const NetworkCriticalSpec& crit,
                                       const EstimatorConfig& est, const SimulationConfig& sim,
                                       std::uint64_t base_seed, std::size_t jobs) {
    crit.validate();
    NetworkCriticalResult result;
    result.per_seed.assign(crit.n_seeds, 0.0);
    parallel_for(crit.n_seeds, jobs, [&](std::size_t k) {
        result.per_seed[k] = network_critical_single_seed(spec, crit, est, sim, base_seed + k);
    });
    std::vector<double> sorted = result.per_seed;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    result.median = (m % 2 == 1) ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    return result;
}

SimulationConfig network_reference_simulation() {
    SimulationConfig sim;
    sim.dt = 0.01;
    sim.t_end = 350.0;
    sim.control_interval = 50;
    sim.record_every = 50;
    sim.x0 = 500.0;
    sim.x_max = 1000.0;
    sim.p_load = 0.0;
    return sim;
}

EstimatorConfig network_reference_estimator() { return EstimatorConfig{200, 0.5}; }

}  // namespace ratchet
