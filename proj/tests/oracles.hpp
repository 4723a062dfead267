#pragma once

// Test-only reference computations. These deliberately avoid the library's
// code paths: closed forms are re-typed from the model definition and the
// optimiser oracle is an exhaustive grid.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "ratchet/thermo_objective.hpp"

namespace oracle {

inline double reference_J(double u, double d, const ratchet::RouterParams& p) {
    const double g = 1.0 - std::exp(-p.gamma * u);
    const double phi = p.kappa * d * (std::exp(p.beta * u) - 1.0);
    const double tds = p.temperature * p.entropy_coeff * d * (1.0 - std::pow(u, p.entropy_exponent));
    return p.alpha * g - phi - tds;
}

struct GridOptimum {
    double u = 0.0;
    double j = 0.0;
    double j0 = 0.0;
    bool abandoned = false;
};

/// Exhaustive argmax on u = k * h, k = 0..1/h. Ties within 1e-12 go to u = 0.
inline GridOptimum brute_force(double d, const ratchet::RouterParams& p, double h = 1e-4) {
    const auto n = static_cast<std::size_t>(std::llround(1.0 / h));
    GridOptimum best{0.0, reference_J(0.0, d, p), reference_J(0.0, d, p), true};
    double best_j = best.j0;
    double best_u = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(n);
        const double j = reference_J(u, d, p);
        if (j > best_j) {
            best_j = j;
            best_u = u;
        }
    }
    if (best_j > best.j0 + 1e-12) {
        best.u = best_u;
        best.j = best_j;
        best.abandoned = false;
    }
    return best;
}

/// Random parameter set over the ranges used for oracle-equivalence checks:
/// log-uniform kappa in [1e-3, 1], beta and gamma in [1, 10], T*s0 in [0, 1].
inline ratchet::RouterParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ratchet::RouterParams p;
    p.alpha = 1.0;
    p.kappa = std::pow(10.0, -3.0 + 3.0 * unit(rng));
    p.beta = 1.0 + 9.0 * unit(rng);
    p.gamma = 1.0 + 9.0 * unit(rng);
    p.temperature = 1.0;
    p.entropy_coeff = unit(rng);
    return p;
}

/// Sample variance (n - 1 denominator).
inline double sample_variance(const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(xs.size() - 1);
}

}  // namespace oracle
