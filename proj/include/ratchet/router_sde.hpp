#pragma once

// Single-router Langevin dynamics under the closed estimate -> optimize ->
// apply loop:
//
//   dx/dt = u P(t) - P_load - Phi(u, D_hat) + g_noise sqrt(2 D(t)) xi(t)
//
// integrated by Euler-Maruyama and clamped to the buffer [0, x_max]. The
// controller only sees D_hat; the integrator uses the scheduled D(t).
// g_noise is 1 by default and u when noise gating is enabled.

#include <cstdint>
#include <vector>

#include "ratchet/noise_estimation.hpp"
#include "ratchet/rng.hpp"
#include "ratchet/schedule.hpp"
#include "ratchet/thermo_objective.hpp"

namespace ratchet {

struct SimulationConfig {
    double dt = 1e-3;
    double t_end = 10.0;
    std::size_t control_interval = 100;  // steps between re-optimisations
    std::size_t record_every = 10;       // steps between trajectory records
    double x0 = 5.0;
    double x_max = 10.0;
    double p_load = 0.3;
    double u_initial = 0.0;  // control held until the first estimate exists
    bool gate_noise = false;
    double optimizer_tol = 1e-9;

    void validate() const;

    friend bool operator==(const SimulationConfig&, const SimulationConfig&) = default;
};

struct RouterState {
    double x = 0.0;
    double u = 0.0;
    /// Noise estimate the current control was chosen for (0 before the first estimate).
    double d_hat = 0.0;
    EstimatorState estimator;
    /// Integration steps per estimator sample and the steps taken since the last one.
    std::size_t sample_stride = 1;
    std::size_t since_sample = 0;
    /// False until the controller has acted on a first estimate.
    bool controlled = false;
};

/// Builds an initial state; pushes x0 as the first estimator sample.
[[nodiscard]] RouterState make_router_state(const SimulationConfig& sim,
                                            const EstimatorConfig& est);

struct TrajectoryRecord {
    double t = 0.0;
    double x = 0.0;
    double u_star = 0.0;
    double d_true = 0.0;
    double d_hat = 0.0;
    double phi_loss = 0.0;
    double entropy_loss = 0.0;
    double j_value = 0.0;
    double coupling_flux = 0.0;  // network runs only

    friend bool operator==(const TrajectoryRecord&, const TrajectoryRecord&) = default;
};

/// Net deterministic power into the buffer: u P - P_load - Phi(u, D_hat).
[[nodiscard]] double drift(double x, double u, double p_mean, double d_hat,
                           const RouterParams& params, double p_load);

/// Clamped Euler-Maruyama update shared by single and networked routers.
[[nodiscard]] double advance_buffer(double x, double rate, double noise_amp, double z, double dt,
                                    double x_max) noexcept;

/// One integration step at time t. The estimator receives x' every
/// `sample_stride` steps.
void em_step(RouterState& state, double t, double dt, const NoiseSchedule& schedule,
             const RouterParams& params, NormalSource& rng, const SimulationConfig& sim);

/// Re-estimates D_hat and u* if the estimator has data. Returns the D_hat in use.
double update_control(RouterState& state, const RouterParams& params,
                      const SimulationConfig& sim);

[[nodiscard]] TrajectoryRecord make_record(const RouterState& state, double t,
                                           const NoiseSchedule& schedule,
                                           const RouterParams& params);

/// Closed-loop run. The Gaussian stream is (seed, stream); identical
/// arguments give bit-identical records.
[[nodiscard]] std::vector<TrajectoryRecord> run_single(const RouterParams& params,
                                                       const EstimatorConfig& est,
                                                       const NoiseSchedule& schedule,
                                                       const SimulationConfig& sim,
                                                       std::uint64_t seed,
                                                       std::uint64_t stream = 0);

/// Integration steps covering [0, t_end].
[[nodiscard]] std::size_t step_count(const SimulationConfig& sim);
/// Integration steps per estimator sample; throws unless est.dt is a whole
/// multiple of sim.dt.
[[nodiscard]] std::size_t sample_stride(const SimulationConfig& sim, const EstimatorConfig& est);

}  // namespace ratchet
