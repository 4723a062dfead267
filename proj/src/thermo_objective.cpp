#include "ratchet/thermo_objective.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "ratchet/errors.hpp"

namespace ratchet {

namespace {

void check_control(double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw DomainError("control effort must lie in [0, 1], got " + std::to_string(u));
    }
}

void check_noise(double noise) {
    if (!(noise >= 0.0) || !std::isfinite(noise)) {
        throw DomainError("noise intensity must be finite and >= 0, got " +
                          std::to_string(noise));
    }
}

double gain_kernel(double u, double gamma) { return 1.0 - std::exp(-gamma * u); }

double cost_kernel(double u, double noise, double kappa, double beta) {
    return kappa * noise * std::expm1(beta * u);
}

double entropy_kernel(double u, double noise, const RouterParams& p) {
    return p.temperature * p.entropy_coeff * noise * (1.0 - std::pow(u, p.entropy_exponent));
}

double j_kernel(double u, double noise, const RouterParams& p) {
    return p.alpha * gain_kernel(u, p.gamma) - cost_kernel(u, noise, p.kappa, p.beta) -
           entropy_kernel(u, noise, p);
}

constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2

// Golden-section maximisation of J on [lo, hi]. Returns the best point seen.
std::pair<double, double> golden_max(double lo, double hi, double noise, const RouterParams& p,
                                     double tol) {
    double a = lo;
    double b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = j_kernel(c, noise, p);
    double fd = j_kernel(d, noise, p);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = j_kernel(c, noise, p);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = j_kernel(d, noise, p);
        }
    }
    const double mid = 0.5 * (a + b);
    const double fm = j_kernel(mid, noise, p);
    // The bracket ends are grid points already known to be no better than the
    // interior, but keep the best of the final probes in case of flat regions.
    std::array<std::pair<double, double>, 3> probes{{{mid, fm}, {c, fc}, {d, fd}}};
    return *std::max_element(probes.begin(), probes.end(),
                             [](const auto& l, const auto& r) { return l.second < r.second; });
}

// J(u_i, D) = A_i - D * C_i on the fixed grid. The D-independent terms are
// kept per thread for the last parameter set, since closed-loop runs call the
// optimiser many times with the same parameters.
struct GridTerms {
    RouterParams params{};
    bool filled = false;
    std::array<double, kOptimizerGridPoints> a{};
    std::array<double, kOptimizerGridPoints> c{};
};

const GridTerms& grid_terms(const RouterParams& p) {
    thread_local GridTerms cache;
    if (cache.filled && cache.params == p) return cache;
    const double h = 1.0 / static_cast<double>(kOptimizerGridPoints - 1);
    for (std::size_t i = 0; i < kOptimizerGridPoints; ++i) {
        const double u = static_cast<double>(i) * h;
        cache.a[i] = p.alpha * gain_kernel(u, p.gamma);
        cache.c[i] = p.kappa * std::expm1(p.beta * u) +
                     p.temperature * p.entropy_coeff * (1.0 - std::pow(u, p.entropy_exponent));
    }
    cache.params = p;
    cache.filled = true;
    return cache;
}

}  // namespace

RouterParams calibrated_params() noexcept { return RouterParams{}; }

void RouterParams::validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw ConfigError(what, std::string("params.") + field);
    };
    require(std::isfinite(alpha) && alpha >= 0.0, "alpha", "must be finite and >= 0");
    require(std::isfinite(gamma) && gamma > 0.0, "gamma", "must be finite and > 0");
    require(std::isfinite(kappa) && kappa >= 0.0, "kappa", "must be finite and >= 0");
    require(std::isfinite(beta) && beta > 0.0, "beta", "must be finite and > 0");
    require(std::isfinite(temperature) && temperature >= 0.0, "temperature",
            "must be finite and >= 0");
    require(std::isfinite(entropy_coeff) && entropy_coeff >= 0.0, "entropy_coeff",
            "must be finite and >= 0");
    require(std::isfinite(entropy_exponent) && entropy_exponent > 0.0, "entropy_exponent",
            "must be finite and > 0");
}

double gain(double u, double gamma) {
    check_control(u);
    if (!(gamma > 0.0)) throw DomainError("gain rate gamma must be > 0");
    return gain_kernel(u, gamma);
}

double info_cost(double u, double noise, double kappa, double beta) {
    check_control(u);
    check_noise(noise);
    return cost_kernel(u, noise, kappa, beta);
}

double entropy_penalty(double u, double noise, const RouterParams& params) {
    check_control(u);
    check_noise(noise);
    return entropy_kernel(u, noise, params);
}

double evaluate_J(double u, double noise, const RouterParams& params) {
    return params.alpha * gain(u, params.gamma) - info_cost(u, noise, params.kappa, params.beta) -
           entropy_penalty(u, noise, params);
}

OptimizationResult optimize_u(double noise, const RouterParams& params, double tol) {
    check_noise(noise);
    if (!(tol > 0.0)) throw DomainError("optimizer tolerance must be > 0");
    try {
        params.validate();
    } catch (const ConfigError& e) {
        throw DomainError(e.what());
    }

    constexpr std::size_t n = kOptimizerGridPoints;
    const double h = 1.0 / static_cast<double>(n - 1);
    const GridTerms& terms = grid_terms(params);
    std::array<double, n> values{};
    for (std::size_t i = 0; i < n; ++i) values[i] = terms.a[i] - noise * terms.c[i];

    OptimizationResult result;
    result.j_at_zero = j_kernel(0.0, noise, params);
    double best_u = 0.0;
    double best_j = values[0];

    // Refine every grid-local maximum so a runner-up peak that the grid
    // under-resolved cannot be lost.
    for (std::size_t i = 1; i < n; ++i) {
        const bool left_ok = values[i] >= values[i - 1];
        const bool right_ok = (i + 1 == n) || values[i] >= values[i + 1];
        if (!left_ok || !right_ok) continue;
        double u = static_cast<double>(i) * h;
        double j = j_kernel(u, noise, params);
        if (i + 1 < n) {
            const double lo = static_cast<double>(i - 1) * h;
            const double hi = static_cast<double>(i + 1) * h;
            auto [gu, gj] = golden_max(lo, hi, noise, params, tol);
            if (gj > j) {
                u = gu;
                j = gj;
            }
        } else {
            // Right boundary: the maximum may sit just inside u = 1.
            auto [gu, gj] = golden_max(static_cast<double>(i - 1) * h, 1.0, noise, params, tol);
            if (gj > j) {
                u = gu;
                j = gj;
            }
        }
        if (j > best_j) {
            best_j = j;
            best_u = u;
        }
    }

    if (best_u == 0.0 || !(best_j > result.j_at_zero + kAbandonTieTolerance)) {
        result.u_star = 0.0;
        result.j_star = result.j_at_zero;
        result.abandoned = true;
    } else {
        result.u_star = std::clamp(best_u, 0.0, 1.0);
        result.j_star = best_j;
        result.abandoned = false;
    }
    return result;
}

}  // namespace ratchet
