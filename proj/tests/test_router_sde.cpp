#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "ratchet/errors.hpp"
#include "ratchet/router_sde.hpp"

using namespace ratchet;

namespace {

RouterParams free_params() {
    RouterParams p = calibrated_params();
    p.kappa = 0.0;
    p.entropy_coeff = 0.0;
    return p;
}

SimulationConfig wide_sim(double dt) {
    SimulationConfig sim;
    sim.dt = dt;
    sim.p_load = 0.0;
    sim.x0 = 500.0;
    sim.x_max = 1000.0;
    return sim;
}

}  // namespace

TEST_CASE("drift arithmetic") {
    auto p = calibrated_params();
    CHECK(drift(1.0, 0.0, 1.0, 3.7, p, 0.0) == 0.0);
    p.kappa = 0.0;
    CHECK(drift(1.0, 1.0, 1.0, 2.0, p, 0.0) == 1.0);
    p.kappa = 1.0;
    p.beta = std::numbers::ln2;
    CHECK(drift(1.0, 1.0, 2.0, 1.0, p, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("em_step deterministic cases") {
    const auto p = free_params();
    SUBCASE("zero noise and zero drift leave x unchanged") {
        SimulationConfig sim = wide_sim(0.1);
        sim.x0 = 3.0;
        auto state = make_router_state(sim, {10, 0.1});
        state.u = 0.0;
        NormalSource rng(1);
        em_step(state, 0.0, 0.1, NoiseSchedule::constant(1.0, 0.0), p, rng, sim);
        CHECK(state.x == 3.0);
    }
    SUBCASE("Euler update with full control") {
        SimulationConfig sim = wide_sim(0.1);
        sim.x0 = 1.0;
        auto state = make_router_state(sim, {10, 0.1});
        state.u = 1.0;
        NormalSource rng(1);
        em_step(state, 0.0, 0.1, NoiseSchedule::constant(1.0, 0.0), p, rng, sim);
        CHECK(state.x == doctest::Approx(1.1).epsilon(1e-15));
        CHECK(state.estimator.sample_count() == 2);
    }
}

TEST_CASE("em_step free diffusion moments") {
    // 2000 paths x 50 steps = 1e5 steps, t = 0.05: Var[x] = 2 D t = 0.1.
    const auto p = free_params();
    const SimulationConfig sim = wide_sim(1e-3);
    const auto schedule = NoiseSchedule::constant(0.0, 1.0);
    std::vector<double> finals;
    for (std::uint64_t path = 0; path < 2000; ++path) {
        auto state = make_router_state(sim, {10, 1e-3});
        state.u = 1.0;
        NormalSource rng(7, path);
        for (int k = 0; k < 50; ++k) em_step(state, k * 1e-3, 1e-3, schedule, p, rng, sim);
        finals.push_back(state.x);
    }
    const double var = oracle::sample_variance(finals);
    const double expected = 2.0 * 1.0 * 0.05;
    const double se = expected * std::sqrt(2.0 / (finals.size() - 1));
    CHECK(std::abs(var - expected) <= 3.0 * se);
}

TEST_CASE("buffer stays inside its bounds under violent noise") {
    const auto p = calibrated_params();
    SimulationConfig sim;
    sim.x_max = 10.0;
    const auto records =
        run_single(p, {}, NoiseSchedule::constant(1.0, 500.0), sim, 3);
    for (const auto& r : records) {
        CHECK(r.x >= 0.0);
        CHECK(r.x <= 10.0);
    }
}

TEST_CASE("noise gating silences an open switch") {
    const auto p = free_params();
    SimulationConfig sim = wide_sim(1e-2);
    sim.gate_noise = true;
    auto state = make_router_state(sim, {10, 1e-2});
    state.u = 0.0;
    NormalSource rng(9);
    for (int k = 0; k < 100; ++k)
        em_step(state, k * 1e-2, 1e-2, NoiseSchedule::constant(1.0, 5.0), p, rng, sim);
    CHECK(state.x == 500.0);
}

TEST_CASE("run_single control regimes") {
    SimulationConfig sim;
    sim.t_end = 2.0;
    const double warm = sim.dt * static_cast<double>(sim.control_interval);

    SUBCASE("noise-free supply keeps u* near 1") {
        // Drift alone leaves a tiny D_hat of order rate^2 * dt / 2.
        const auto recs = run_single(calibrated_params(), {}, NoiseSchedule::constant(1.0, 0.0), sim, 1);
        for (const auto& r : recs) {
            if (r.t < warm - 1e-12) continue;
            CHECK(r.d_hat < 1e-3);
            CHECK(r.u_star > 0.9);
            CHECK(r.u_star == optimize_u(r.d_hat, calibrated_params()).u_star);
        }
    }
    SUBCASE("noise far above critical pins u* at 0 with no information loss") {
        const auto recs = run_single(calibrated_params(), {}, NoiseSchedule::constant(1.0, 10.0), sim, 1);
        for (const auto& r : recs) {
            if (r.t >= warm - 1e-12) {
                CHECK(r.u_star == 0.0);
                CHECK(r.phi_loss == 0.0);
            }
        }
    }
    SUBCASE("free information gives full control under any schedule") {
        SolarConfig solar;
        solar.grid_dt = sim.dt;
        solar.horizon = sim.t_end;
        const auto recs =
            run_single(free_params(), {}, NoiseSchedule::pseudo_solar(solar, 4), sim, 4);
        for (const auto& r : recs) {
            if (r.t >= warm - 1e-12) CHECK(r.u_star == 1.0);
        }
    }
}

TEST_CASE("pseudo-solar noise bursts produce abandonment episodes") {
    SimulationConfig sim;
    sim.t_end = 10.0;
    SolarConfig solar;
    solar.d_base = 0.5;
    solar.d_cloud = 4.0;
    solar.grid_dt = sim.dt;
    solar.horizon = sim.t_end;
    const auto schedule = NoiseSchedule::pseudo_solar(solar, 21);
    const auto recs = run_single(calibrated_params(), {}, schedule, sim, 21);
    std::size_t dropped = 0;
    std::size_t active = 0;
    for (const auto& r : recs) {
        if (r.t < 0.1) continue;
        (r.u_star == 0.0 ? dropped : active) += 1;
        CHECK(r.phi_loss >= 0.0);
        CHECK(r.entropy_loss >= 0.0);
        if (r.u_star == 0.0) CHECK(r.phi_loss == 0.0);
    }
    CHECK(dropped > 0);
    CHECK(active > 0);
}

TEST_CASE("run_single is bit-reproducible per seed") {
    SimulationConfig sim;
    sim.t_end = 1.0;
    SolarConfig solar;
    solar.grid_dt = sim.dt;
    solar.horizon = sim.t_end;
    const auto schedule = NoiseSchedule::pseudo_solar(solar, 8);
    const auto a = run_single(calibrated_params(), {}, schedule, sim, 8);
    const auto b = run_single(calibrated_params(), {}, schedule, sim, 8);
    const auto c = run_single(calibrated_params(), {}, schedule, sim, 9);
    CHECK(a == b);
    CHECK_FALSE(a == c);
}

TEST_CASE("without re-optimisation the loop is a plain Euler-Maruyama integrator") {
    const auto p = free_params();
    SimulationConfig sim = wide_sim(1e-3);
    sim.t_end = 0.5;
    sim.control_interval = 1000000;
    sim.record_every = 1;
    sim.u_initial = 1.0;
    const auto schedule = NoiseSchedule::constant(0.0, 2.0);
    const auto recs = run_single(p, {}, schedule, sim, 12, 3);

    NormalSource rng(12, 3);
    double x = sim.x0;
    for (std::size_t k = 0; k < recs.size(); ++k) {
        CHECK(recs[k].x == x);
        CHECK(recs[k].u_star == 1.0);
        x = std::clamp(x + std::sqrt(2.0 * 2.0 * sim.dt) * rng(), 0.0, sim.x_max);
    }
}

TEST_CASE("pseudo-solar schedule") {
    SolarConfig solar;
    solar.peak_power = 2.0;
    solar.day_length = 8.0;
    solar.horizon = 8.0;
    solar.grid_dt = 0.01;
    const auto s = NoiseSchedule::pseudo_solar(solar, 5);
    CHECK(s.p_mean(0.0) == 0.0);
    CHECK(s.p_mean(2.0) == 2.0);
    CHECK(s.p_mean(6.0) == 0.0);  // night side clamps at zero
    const auto again = NoiseSchedule::pseudo_solar(solar, 5);
    const auto other = NoiseSchedule::pseudo_solar(solar, 6);
    bool differs = false;
    for (int k = 0; k <= 800; ++k) {
        const double t = k * 0.01;
        CHECK(s.noise(t) == again.noise(t));
        CHECK(s.cloud(t) >= 0.0);
        CHECK(s.cloud(t) <= 1.0);
        CHECK(s.noise(t) >= solar.d_base);
        differs = differs || s.noise(t) != other.noise(t);
    }
    CHECK(differs);

    solar.day_length = 0.0;
    CHECK_THROWS_AS((void)NoiseSchedule::pseudo_solar(solar, 1), ConfigError);
    solar.day_length = 8.0;
    solar.d_cloud = -1.0;
    CHECK_THROWS_AS((void)NoiseSchedule::pseudo_solar(solar, 1), ConfigError);
}

TEST_CASE("piecewise schedule and configuration errors") {
    const auto s = NoiseSchedule::piecewise({{0.0, 1.0, 0.5}, {2.0, 0.5, 3.0}});
    CHECK(s.noise(1.999) == 0.5);
    CHECK(s.noise(2.0) == 3.0);
    CHECK(s.p_mean(5.0) == 0.5);
    CHECK_THROWS_AS((void)NoiseSchedule::piecewise({{1.0, 1.0, 0.5}, {1.0, 1.0, 0.5}}), ConfigError);
    CHECK_THROWS_AS((void)NoiseSchedule::constant(1.0, -0.1), ConfigError);

    SimulationConfig sim;
    EstimatorConfig est{10, 1.5e-3};  // not a multiple of dt
    CHECK_THROWS_AS((void)run_single(calibrated_params(), est, NoiseSchedule::constant(1, 1), sim, 0),
                    ConfigError);
    sim.control_interval = 0;
    CHECK_THROWS_AS((void)run_single(calibrated_params(), {}, NoiseSchedule::constant(1, 1), sim, 0),
                    ConfigError);
}
