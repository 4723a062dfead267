#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ratchet/bifurcation.hpp"
#include "ratchet/errors.hpp"
#include "ratchet/network.hpp"

using namespace ratchet;

namespace {

// Coupling only: no supply, no load, no information cost, no noise, no clamp.
NetworkSpec pure_coupling(Topology topo, double g) {
    RouterParams p = calibrated_params();
    p.kappa = 0.0;
    const std::size_t n = topo.size();
    return NetworkSpec{std::move(topo), g, {p},
                       std::vector<NoiseSchedule>(n, NoiseSchedule::constant(0.0, 0.0))};
}

SimulationConfig unbounded_sim() {
    SimulationConfig sim;
    sim.dt = 0.1;
    sim.p_load = 0.0;
    sim.x0 = 0.0;
    sim.x_max = 1e12;
    return sim;
}

NetworkState state_with(const NetworkSpec& spec, const SimulationConfig& sim,
                        std::vector<double> xs) {
    auto s = make_network_state(spec, sim, {10, sim.dt});
    for (std::size_t i = 0; i < xs.size(); ++i) s.nodes[i].x = xs[i];
    return s;
}

}  // namespace

TEST_CASE("topology builders") {
    CHECK(Topology::ring(5).edges().size() == 5);
    CHECK(Topology::line(5).edges().size() == 4);
    CHECK(Topology::star(5).neighbors(0).size() == 4);
    CHECK(Topology::complete(5).edges().size() == 10);
    CHECK_THROWS_AS(Topology(3, {{0, 3}}), ConfigError);
    CHECK_THROWS_AS(Topology(3, {{1, 1}}), ConfigError);
    CHECK_THROWS_AS(Topology(3, {{0, 1}, {1, 0}}), ConfigError);
}

TEST_CASE("edge list parsing") {
    const auto t = Topology::parse_edge_list(4, "# ring of four\n0 1\n1 2 # inline\n\n2\t3\n3 0\n");
    CHECK(t.edges().size() == 4);
    CHECK(t.neighbors(0) == std::vector<std::size_t>{1, 3});
    CHECK_THROWS_AS((void)Topology::parse_edge_list(4, "0 1 2\n"), ConfigError);
    CHECK_THROWS_AS((void)Topology::parse_edge_list(4, "0 x\n"), ConfigError);
    CHECK_THROWS_AS((void)Topology::parse_edge_list(4, "0 9\n"), ConfigError);
    CHECK_THROWS_AS((void)Topology::from_edge_file(4, "/nonexistent/edges.txt"), ConfigError);
}

TEST_CASE("coupling term") {
    const auto sim = unbounded_sim();
    SUBCASE("equal levels exchange nothing") {
        const auto spec = pure_coupling(Topology::ring(5), 0.7);
        const auto s = state_with(spec, sim, {2, 2, 2, 2, 2});
        for (std::size_t i = 0; i < 5; ++i) CHECK(coupling_term(s, spec, i) == 0.0);
    }
    SUBCASE("two nodes") {
        const auto spec = pure_coupling(Topology::line(2), 1.0);
        const auto s = state_with(spec, sim, {1, 0});
        CHECK(coupling_term(s, spec, 0) == -1.0);
        CHECK(coupling_term(s, spec, 1) == 1.0);
        CHECK_THROWS_AS((void)coupling_term(s, spec, 2), std::out_of_range);
    }
    SUBCASE("net exchange vanishes") {
        const auto spec = pure_coupling(Topology::complete(6), 0.3);
        const auto s = state_with(spec, sim, {1.5, -2, 7, 0.25, 3, 11});
        double total = 0.0;
        for (std::size_t i = 0; i < 6; ++i) total += coupling_term(s, spec, i);
        CHECK(std::abs(total) < 1e-12);
    }
}

TEST_CASE("network_step explicit Euler exchange") {
    const auto sim = unbounded_sim();
    const auto spec = pure_coupling(Topology::line(2), 1.0);
    auto s = state_with(spec, sim, {1, 0});
    for (auto& n : s.nodes) n.u = 0.0;
    auto rngs = node_streams(1, 2);
    network_step(s, spec, 0.1, rngs, sim);
    CHECK(s.nodes[0].x == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(s.nodes[1].x == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("pure coupling conserves total energy on arbitrary graphs") {
    auto sim = unbounded_sim();
    sim.dt = 0.01;
    const Topology graphs[] = {Topology::ring(7), Topology::star(6), Topology::complete(5),
                               Topology(6, {{0, 1}, {0, 2}, {2, 3}, {3, 4}, {1, 4}, {4, 5}})};
    for (const auto& topo : graphs) {
        const auto spec = pure_coupling(topo, 0.8);
        std::vector<double> xs(topo.size());
        for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 10.0 + 3.0 * std::sin(1.7 * i);
        auto s = state_with(spec, sim, xs);
        for (auto& n : s.nodes) n.u = 0.0;
        auto rngs = node_streams(2, topo.size());
        auto total = [&] {
            double t = 0.0;
            for (const auto& n : s.nodes) t += n.x;
            return t;
        };
        for (int k = 0; k < 2000; ++k) {
            const double before = total();
            network_step(s, spec, sim.dt, rngs, sim);
            CHECK(std::abs(total() - before) <= 1e-9 * std::abs(before));
        }
    }
}

TEST_CASE("uncoupled network equals independent single-router runs") {
    const std::size_t n = 4;
    SimulationConfig sim;
    sim.t_end = 1.0;
    const EstimatorConfig est{};
    std::vector<NoiseSchedule> schedules;
    for (std::size_t i = 0; i < n; ++i) schedules.push_back(NoiseSchedule::constant(1.0, 0.5 + i));
    const NetworkSpec spec{Topology::ring(n), 0.0, {calibrated_params()}, schedules};
    const auto net = run_network(spec, est, sim, 77);
    for (std::size_t i = 0; i < n; ++i) {
        const auto single = run_single(calibrated_params(), est, schedules[i], sim, 77, i);
        REQUIRE(single.size() == net[i].size());
        for (std::size_t k = 0; k < single.size(); ++k) {
            auto rec = net[i][k];
            CHECK(rec.coupling_flux == 0.0);
            CHECK(rec == single[k]);
        }
    }
}

TEST_CASE("relabelling a complete graph permutes trajectories") {
    SimulationConfig sim;
    sim.t_end = 0.5;
    const EstimatorConfig est{};
    const std::vector<double> noise{0.3, 1.0, 2.5};
    const std::vector<std::size_t> perm{2, 0, 1};  // new label -> old label
    std::vector<NoiseSchedule> a, b;
    for (double d : noise) a.push_back(NoiseSchedule::constant(1.0, d));
    for (std::size_t k : perm) b.push_back(NoiseSchedule::constant(1.0, noise[k]));

    // Node streams follow the label, so run the permuted network through an
    // explicit per-node stream mapping.
    const NetworkSpec sa{Topology::complete(3), 0.4, {calibrated_params()}, a};
    const NetworkSpec sb{Topology::complete(3), 0.4, {calibrated_params()}, b};
    auto run = [&](const NetworkSpec& spec, const std::vector<std::size_t>& streams) {
        auto state = make_network_state(spec, sim, est);
        std::vector<NormalSource> rngs;
        for (std::size_t s : streams) rngs.emplace_back(5, s);
        std::vector<std::vector<double>> xs(3);
        for (std::size_t k = 0; k < step_count(sim); ++k) {
            state.t = k * sim.dt;
            if (k % sim.control_interval == 0)
                for (auto& node : state.nodes) update_control(node, spec.params(0), sim);
            network_step(state, spec, sim.dt, rngs, sim);
            for (std::size_t i = 0; i < 3; ++i) xs[i].push_back(state.nodes[i].x);
        }
        return xs;
    };
    const auto xa = run(sa, {0, 1, 2});
    const auto xb = run(sb, perm);
    for (std::size_t i = 0; i < 3; ++i) {
        REQUIRE(xb[i].size() == xa[perm[i]].size());
        for (std::size_t k = 0; k < xb[i].size(); ++k)
            CHECK(xb[i][k] == doctest::Approx(xa[perm[i]][k]).epsilon(1e-12));
    }
}

TEST_CASE("per-node noise estimates track their schedules") {
    SimulationConfig sim;
    sim.t_end = 5.0;
    sim.x0 = 500.0;
    sim.x_max = 1000.0;
    const EstimatorConfig est{1000, 1e-3};
    std::vector<NoiseSchedule> schedules;
    for (double d : {0.5, 1.0, 2.0, 3.0, 1.5}) schedules.push_back(NoiseSchedule::constant(1.0, d));
    const NetworkSpec spec{Topology::ring(5), 0.5, {calibrated_params()}, schedules};
    const auto net = run_network(spec, est, sim, 31);
    for (std::size_t i = 0; i < 5; ++i) {
        const auto& last = net[i].back();
        CHECK(std::abs(last.d_hat - last.d_true) <= 0.10 * last.d_true);
    }
}

TEST_CASE("burst scenario") {
    const auto est = network_reference_estimator();
    auto sim = network_reference_simulation();
    BurstScenario scenario;
    sim.t_end = 200.0;
    scenario.burst_start = 20.0;
    scenario.burst_end = 200.0;
    const double level = 4.0;

    auto spec_for = [&](double g) {
        return NetworkSpec{Topology::ring(5), g, {calibrated_params()},
                           burst_schedules(5, scenario, level)};
    };

    SUBCASE("uncoupled burst node abandons while neighbours carry on") {
        const auto net = run_network(spec_for(0.0), est, sim, 3);
        const auto unperturbed = run_network(
            NetworkSpec{Topology::ring(5), 0.0, {calibrated_params()},
                        burst_schedules(5, scenario, scenario.base_noise)},
            est, sim, 3);
        bool episode = false;
        for (const auto& r : net[0]) episode = episode || (r.t > 150.0 && r.u_star == 0.0);
        CHECK(episode);
        for (std::size_t i = 1; i < 5; ++i) CHECK(net[i] == unperturbed[i]);
    }
    SUBCASE("coupling spreads the burst into the neighbours") {
        const auto net = run_network(spec_for(0.5), est, sim, 3);
        const auto calm = run_network(
            NetworkSpec{Topology::ring(5), 0.5, {calibrated_params()},
                        burst_schedules(5, scenario, scenario.base_noise)},
            est, sim, 3);
        for (std::size_t i = 1; i < 5; ++i) {
            double dev = 0.0;
            for (std::size_t k = 0; k < net[i].size(); ++k)
                dev = std::max(dev, std::abs(net[i][k].x - calm[i][k].x));
            CHECK(dev > 0.5);
        }
    }
    SUBCASE("same seed, coupling on or off: only the coupling differs") {
        const auto a = run_network(spec_for(0.5), est, sim, 3);
        const auto b = run_network(spec_for(0.5), est, sim, 3);
        const auto c = run_network(spec_for(0.0), est, sim, 3);
        CHECK(a == b);
        CHECK_FALSE(a == c);
        // Before any node departs from x0 the runs agree.
        CHECK(a[2].front().x == c[2].front().x);
    }
    SUBCASE("scenario validation") {
        BurstScenario bad = scenario;
        bad.node = 9;
        CHECK_THROWS_AS(bad.validate(5, sim.t_end), ConfigError);
        bad = scenario;
        bad.burst_end = 10.0;
        CHECK_THROWS_AS(bad.validate(5, sim.t_end), ConfigError);
    }
}

TEST_CASE("uncoupled network critical point reduces to the single router") {
    // With g = 0 the designated node is an isolated router fed by stream
    // (seed, node); its burst threshold must sit at or above the static
    // critical noise (estimator scatter only delays abandonment on average)
    // and within the estimator's statistical band of it.
    const auto est = network_reference_estimator();
    const auto sim = network_reference_simulation();
    NetworkCriticalSpec crit;
    crit.n_seeds = 3;
    const NetworkSpec spec{Topology::ring(5), 0.0, {calibrated_params()},
                           burst_schedules(5, crit.scenario, 0.0)};
    const auto res = network_critical(spec, crit, est, sim, 100);
    const double d_c = find_critical(calibrated_params(), 1.0, 4.0, 1e-4).d_c;
    REQUIRE(res.per_seed.size() == 3);
    CHECK(res.median >= d_c - crit.tol);
    CHECK(res.median <= 1.35 * d_c);
}
