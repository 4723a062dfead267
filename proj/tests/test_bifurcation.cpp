#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ratchet/bifurcation.hpp"
#include "ratchet/errors.hpp"

using namespace ratchet;

TEST_CASE("sweep without information cost never leaves full control") {
    SweepSpec spec;
    spec.params.kappa = 0.0;
    spec.params.entropy_coeff = 0.0;
    spec.n_points = 41;
    const auto curve = sweep(spec);
    REQUIRE(curve.size() == 41);
    for (const auto& p : curve) {
        CHECK(p.u_star == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(oracle::brute_force(p.noise, spec.params).u == 1.0);
    }
    CHECK(detect_transitions(curve, spec.jump_threshold).empty());
}

TEST_CASE("calibrated sweep has a single first-order drop near 2.21") {
    const SweepSpec spec;  // [0, 4], 401 points
    const auto curve = sweep(spec);
    REQUIRE(curve.size() == 401);
    CHECK(curve.front().noise == 0.0);
    CHECK(curve.back().noise == 4.0);
    for (std::size_t i = 1; i < curve.size(); ++i) {
        CHECK(curve[i].noise > curve[i - 1].noise);
        CHECK(curve[i].u_star <= curve[i - 1].u_star + 1e-9);
    }
    const auto jumps = detect_transitions(curve, spec.jump_threshold);
    REQUIRE(jumps.size() == 1);
    CHECK(jumps[0].first_order);
    CHECK(jumps[0].u_right == 0.0);
    CHECK(jumps[0].d_left == doctest::Approx(2.21).epsilon(0.05 / 2.21));
}

TEST_CASE("sweep output does not depend on the worker count") {
    SweepSpec spec;
    spec.n_points = 57;
    CHECK(sweep(spec, 1) == sweep(spec, 4));
}

TEST_CASE("find_critical") {
    const auto p = calibrated_params();
    SUBCASE("calibrated defaults") {
        const auto cp = find_critical(p, 1.0, 4.0, 1e-4);
        CHECK(std::abs(cp.d_c - 2.21) <= 0.05);
        CHECK(cp.bracket_hi - cp.bracket_lo <= 1e-4);
        CHECK(cp.order == TransitionOrder::first_order);
        CHECK(cp.u_before - cp.u_after >= 0.005);
        CHECK(cp.u_after == 0.0);
    }
    SUBCASE("agrees with the sweep within one grid spacing") {
        const SweepSpec spec;
        const auto jumps = detect_transitions(sweep(spec), spec.jump_threshold);
        REQUIRE(jumps.size() == 1);
        const auto cp = find_critical(p, 1.0, 4.0, 1e-4);
        CHECK(cp.d_c >= jumps[0].d_left - 0.01);
        CHECK(cp.d_c <= jumps[0].d_right + 0.01);
    }
    SUBCASE("free information is never abandoned") {
        RouterParams free = p;
        free.kappa = 0.0;
        CHECK_THROWS_AS((void)find_critical(free, 1.0, 4.0, 1e-4), NotBracketedError);
    }
    SUBCASE("reversed bracket is rejected") {
        CHECK_THROWS_AS((void)find_critical(p, 3.0, 4.0, 1e-4), NotBracketedError);
    }
    SUBCASE("doubling kappa lowers the critical noise") {
        RouterParams doubled = p;
        doubled.kappa *= 2.0;
        const double base = find_critical(p, 0.1, 10.0, 1e-5).d_c;
        const double more = find_critical(doubled, 0.1, 10.0, 1e-5).d_c;
        CHECK(more < base);
    }
}

TEST_CASE("abandonment indicator is a single step on a dense grid") {
    const auto p = calibrated_params();
    const double d_c = find_critical(p, 1.0, 4.0, 1e-6).d_c;
    for (int k = 0; k <= 4000; ++k) {
        const double d = k * 0.001;
        if (std::abs(d - d_c) < 2e-6) continue;
        CHECK(optimize_u(d, p).abandoned == (d > d_c));
    }
}
