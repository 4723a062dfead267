#pragma once

// u*(D) bifurcation curve and the location of the abandonment boundary.
//
// The critical noise D_c is where the interior optimum of J stops beating
// J(0). u* is a memoryless argmax, so upward and downward sweeps coincide;
// there is no hysteresis loop to trace.

#include <cstddef>
#include <vector>

#include "ratchet/thermo_objective.hpp"

namespace ratchet {

struct SweepSpec {
    double d_min = 0.0;
    double d_max = 4.0;
    std::size_t n_points = 401;
    RouterParams params{};
    double jump_threshold = 0.005;
    double optimizer_tol = 1e-9;

    void validate() const;
};

struct SweepPoint {
    double noise = 0.0;
    double u_star = 0.0;
    double j_star = 0.0;
    bool abandoned = false;

    friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

enum class TransitionOrder { first_order, none };

struct CriticalPoint {
    double d_c = 0.0;
    double u_before = 0.0;
    double u_after = 0.0;
    TransitionOrder order = TransitionOrder::none;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

/// A change of abandonment state between adjacent sweep points.
struct Transition {
    std::size_t index = 0;  // points [index] and [index + 1]
    double d_left = 0.0;
    double d_right = 0.0;
    double u_left = 0.0;
    double u_right = 0.0;
    bool first_order = false;  // |delta u*| >= jump_threshold
};

/// Evaluates optimize_u on the ascending D grid. Output is ordered by index
/// regardless of `jobs`.
[[nodiscard]] std::vector<SweepPoint> sweep(const SweepSpec& spec, std::size_t jobs = 1);

[[nodiscard]] std::vector<Transition> detect_transitions(const std::vector<SweepPoint>& curve,
                                                         double jump_threshold);

/// Bisection on the abandonment indicator. Throws NotBracketedError unless
/// control survives at d_lo and is abandoned at d_hi.
[[nodiscard]] CriticalPoint find_critical(const RouterParams& params, double d_lo, double d_hi,
                                          double tol, double jump_threshold = 0.005,
                                          double optimizer_tol = 1e-9);

[[nodiscard]] const char* to_string(TransitionOrder order) noexcept;

}  // namespace ratchet
