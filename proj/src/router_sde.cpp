#include "ratchet/router_sde.hpp"

#include <algorithm>
#include <cmath>

#include "ratchet/errors.hpp"

namespace ratchet {

void SimulationConfig::validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw ConfigError(what, std::string("simulation.") + field);
    };
    require(std::isfinite(dt) && dt > 0.0, "dt", "must be > 0");
    require(std::isfinite(t_end) && t_end > 0.0, "t_end", "must be > 0");
    require(control_interval >= 1, "control_interval", "must be >= 1");
    require(record_every >= 1, "record_every", "must be >= 1");
    require(std::isfinite(x_max) && x_max > 0.0, "x_max", "must be > 0");
    require(std::isfinite(x0) && x0 >= 0.0 && x0 <= x_max, "x0", "must lie in [0, x_max]");
    require(std::isfinite(p_load) && p_load >= 0.0, "p_load", "must be >= 0");
    require(u_initial >= 0.0 && u_initial <= 1.0, "u_initial", "must lie in [0, 1]");
    require(std::isfinite(optimizer_tol) && optimizer_tol > 0.0, "optimizer_tol", "must be > 0");
}

std::size_t step_count(const SimulationConfig& sim) {
    return static_cast<std::size_t>(std::llround(sim.t_end / sim.dt));
}

std::size_t sample_stride(const SimulationConfig& sim, const EstimatorConfig& est) {
    const double ratio = est.dt / sim.dt;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        throw ConfigError("sampling interval must be a whole multiple of simulation.dt",
                          "estimator.sample_interval");
    }
    return static_cast<std::size_t>(rounded);
}

RouterState make_router_state(const SimulationConfig& sim, const EstimatorConfig& est) {
    RouterState state{.x = sim.x0,
                      .u = sim.u_initial,
                      .d_hat = 0.0,
                      .estimator = EstimatorState(est),
                      .sample_stride = sample_stride(sim, est),
                      .since_sample = 0,
                      .controlled = false};
    state.estimator.push_sample(sim.x0);
    return state;
}

double drift(double /*x*/, double u, double p_mean, double d_hat, const RouterParams& params,
             double p_load) {
    return u * p_mean - p_load - info_cost(u, d_hat, params.kappa, params.beta);
}

double advance_buffer(double x, double rate, double noise_amp, double z, double dt,
                      double x_max) noexcept {
    return std::clamp(x + rate * dt + noise_amp * z, 0.0, x_max);
}

void em_step(RouterState& state, double t, double dt, const NoiseSchedule& schedule,
             const RouterParams& params, NormalSource& rng, const SimulationConfig& sim) {
    const double rate = drift(state.x, state.u, schedule.p_mean(t), state.d_hat, params, sim.p_load);
    const double gate = sim.gate_noise ? state.u : 1.0;
    const double amp = gate * std::sqrt(2.0 * schedule.noise(t) * dt);
    const double z = rng();
    state.x = advance_buffer(state.x, rate, amp, z, dt, sim.x_max);
    if (++state.since_sample == state.sample_stride) {
        state.since_sample = 0;
        state.estimator.push_sample(state.x);
    }
}

double update_control(RouterState& state, const RouterParams& params,
                      const SimulationConfig& sim) {
    if (!state.estimator.ready()) return state.d_hat;
    const double d_hat = state.estimator.current_estimate();
    // D_hat only moves when a sample lands, so repeated ticks reuse the last answer.
    if (!state.controlled || d_hat != state.d_hat) {
        state.controlled = true;
        state.d_hat = d_hat;
        state.u = optimize_u(d_hat, params, sim.optimizer_tol).u_star;
    }
    return state.d_hat;
}

TrajectoryRecord make_record(const RouterState& state, double t, const NoiseSchedule& schedule,
                             const RouterParams& params) {
    TrajectoryRecord rec;
    rec.t = t;
    rec.x = state.x;
    rec.u_star = state.u;
    rec.d_true = schedule.noise(t);
    rec.d_hat = state.d_hat;
    rec.phi_loss = info_cost(state.u, state.d_hat, params.kappa, params.beta);
    rec.entropy_loss = entropy_penalty(state.u, state.d_hat, params);
    rec.j_value = evaluate_J(state.u, state.d_hat, params);
    return rec;
}

std::vector<TrajectoryRecord> run_single(const RouterParams& params, const EstimatorConfig& est,
                                         const NoiseSchedule& schedule,
                                         const SimulationConfig& sim, std::uint64_t seed,
                                         std::uint64_t stream) {
    params.validate();
    est.validate();
    sim.validate();
    if (schedule.horizon() < sim.t_end) {
        throw ConfigError("schedule horizon is shorter than the run", "schedule.solar.horizon");
    }

    RouterState state = make_router_state(sim, est);
    NormalSource rng(seed, stream);
    const std::size_t n = step_count(sim);
    std::vector<TrajectoryRecord> out;
    out.reserve(n / sim.record_every + 2);

    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * sim.dt;
        if (k % sim.control_interval == 0) update_control(state, params, sim);
        if (k % sim.record_every == 0) out.push_back(make_record(state, t, schedule, params));
        em_step(state, t, sim.dt, schedule, params, rng, sim);
    }
    if (n % sim.record_every == 0) {
        out.push_back(make_record(state, static_cast<double>(n) * sim.dt, schedule, params));
    }
    return out;
}

}  // namespace ratchet
