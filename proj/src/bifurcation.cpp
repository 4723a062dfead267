#include "ratchet/bifurcation.hpp"

#include <cmath>
#include <string>

#include "ratchet/errors.hpp"
#include "ratchet/parallel.hpp"

namespace ratchet {

void SweepSpec::validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw ConfigError(what, std::string("sweep.") + field);
    };
    require(std::isfinite(d_min) && d_min >= 0.0, "d_min", "must be >= 0");
    require(std::isfinite(d_max) && d_max > d_min, "d_max", "must exceed d_min");
    require(n_points >= 2, "n_points", "must be >= 2");
    require(std::isfinite(jump_threshold) && jump_threshold > 0.0, "jump_threshold",
            "must be > 0");
    params.validate();
}

std::vector<SweepPoint> sweep(const SweepSpec& spec, std::size_t jobs) {
    spec.validate();
    std::vector<SweepPoint> out(spec.n_points);
    const double step = (spec.d_max - spec.d_min) / static_cast<double>(spec.n_points - 1);
    parallel_for(spec.n_points, jobs, [&](std::size_t i) {
        const double d = (i + 1 == spec.n_points) ? spec.d_max
                                                  : spec.d_min + static_cast<double>(i) * step;
        const auto r = optimize_u(d, spec.params, spec.optimizer_tol);
        out[i] = {d, r.u_star, r.j_star, r.abandoned};
    });
    return out;
}

std::vector<Transition> detect_transitions(const std::vector<SweepPoint>& curve,
                                           double jump_threshold) {
    std::vector<Transition> out;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const auto& a = curve[i];
        const auto& b = curve[i + 1];
        if (a.abandoned == b.abandoned) continue;
        out.push_back({i, a.noise, b.noise, a.u_star, b.u_star,
                       std::abs(a.u_star - b.u_star) >= jump_threshold});
    }
    return out;
}

CriticalPoint find_critical(const RouterParams& params, double d_lo, double d_hi, double tol,
                            double jump_threshold, double optimizer_tol) {
    if (!(tol > 0.0)) throw DomainError("bisection tolerance must be > 0");
    if (!(d_lo >= 0.0) || !(d_hi > d_lo)) throw DomainError("need 0 <= d_lo < d_hi");
    auto lo = optimize_u(d_lo, params, optimizer_tol);
    const auto hi = optimize_u(d_hi, params, optimizer_tol);
    if (lo.abandoned || !hi.abandoned) {
        throw NotBracketedError("abandonment boundary is not bracketed by [" +
                                std::to_string(d_lo) + ", " + std::to_string(d_hi) + "]");
    }
    double a = d_lo;
    double b = d_hi;
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        const auto r = optimize_u(mid, params, optimizer_tol);
        if (r.abandoned) {
            b = mid;
        } else {
            a = mid;
            lo = r;
        }
    }
    CriticalPoint cp;
    cp.d_c = 0.5 * (a + b);
    cp.bracket_lo = a;
    cp.bracket_hi = b;
    cp.u_before = lo.u_star;
    cp.u_after = 0.0;
    cp.order = (cp.u_before - cp.u_after >= jump_threshold) ? TransitionOrder::first_order
                                                            : TransitionOrder::none;
    return cp;
}

const char* to_string(TransitionOrder order) noexcept {
    return order == TransitionOrder::first_order ? "first_order" : "none";
}

}  // namespace ratchet
