#pragma once

// Thermodynamic evaluation of a router's control effort.
//
// For a control effort u in [0, 1] and noise intensity D >= 0 the router
// scores
//
//   J(u, D) = alpha * G(u) - Phi(u, D) - T dS(u, D)
//
// with saturating gain G(u) = 1 - exp(-gamma u), exponential information
// cost Phi(u, D) = kappa D (exp(beta u) - 1) and residual-entropy penalty
// T dS(u, D) = T s0 D (1 - u^q). Every term is a power (J/s).
//
// The entropy exponent q shapes how quickly regulation removes residual
// entropy. q = 1 is the linear form; q < 2 makes J non-concave near u = 0,
// which is what turns the loss of control at high noise into a finite jump.

#include <cstddef>

namespace ratchet {

struct RouterParams {
    double alpha = 1.0;
    double gamma = 5.0;
    double kappa = 0.48;
    double beta = 5.0;
    double temperature = 1.0;
    double entropy_coeff = 2.5;
    double entropy_exponent = 1.5;

    /// Throws ConfigError naming the first violated field.
    void validate() const;

    friend bool operator==(const RouterParams&, const RouterParams&) = default;
};

/// Calibrated default set: critical noise D_c ~= 2.21, pre-jump u* ~= 0.0115.
[[nodiscard]] RouterParams calibrated_params() noexcept;

struct OptimizationResult {
    double u_star = 0.0;
    double j_star = 0.0;
    double j_at_zero = 0.0;
    bool abandoned = false;
};

[[nodiscard]] double gain(double u, double gamma);
[[nodiscard]] double info_cost(double u, double noise, double kappa, double beta);
[[nodiscard]] double entropy_penalty(double u, double noise, const RouterParams& params);
[[nodiscard]] double evaluate_J(double u, double noise, const RouterParams& params);

inline constexpr std::size_t kOptimizerGridPoints = 1024;
/// Interior optimum within this of J(0) counts as a loss to the origin.
inline constexpr double kAbandonTieTolerance = 1e-12;

/// Global maximiser of J over [0, 1]: coarse grid, then golden-section
/// refinement of every grid-local maximum. Returns u* = 0 with
/// `abandoned = true` when nothing beats J(0) by more than the tie tolerance.
[[nodiscard]] OptimizationResult optimize_u(double noise, const RouterParams& params,
                                            double tol = 1e-9);

}  // namespace ratchet
