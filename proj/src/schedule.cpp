#include "ratchet/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ratchet/errors.hpp"
#include "ratchet/rng.hpp"

namespace ratchet {

void SolarConfig::validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw ConfigError(what, std::string("schedule.solar.") + field);
    };
    require(std::isfinite(peak_power) && peak_power >= 0.0, "peak_power", "must be >= 0");
    require(std::isfinite(day_length) && day_length > 0.0, "day_length", "must be > 0");
    require(std::isfinite(d_base) && d_base >= 0.0, "d_base", "must be >= 0");
    require(std::isfinite(d_cloud) && d_cloud >= 0.0, "d_cloud", "must be >= 0");
    require(std::isfinite(cloud_relaxation) && cloud_relaxation > 0.0, "cloud_relaxation",
            "must be > 0");
    require(std::isfinite(cloud_std) && cloud_std >= 0.0, "cloud_std", "must be >= 0");
    require(std::isfinite(cloud_mean), "cloud_mean", "must be finite");
    require(std::isfinite(grid_dt) && grid_dt > 0.0, "grid_dt", "must be > 0");
    require(std::isfinite(horizon) && horizon > 0.0, "horizon", "must be > 0");
}

NoiseSchedule NoiseSchedule::constant(double p_mean, double noise) {
    if (!(p_mean >= 0.0) || !std::isfinite(p_mean))
        throw ConfigError("must be finite and >= 0", "schedule.p_mean");
    if (!(noise >= 0.0) || !std::isfinite(noise))
        throw ConfigError("must be finite and >= 0", "schedule.noise");
    NoiseSchedule s;
    s.kind_ = Kind::constant;
    s.segments_.push_back({0.0, p_mean, noise});
    return s;
}

NoiseSchedule NoiseSchedule::piecewise(std::vector<ScheduleSegment> segments) {
    if (segments.empty()) throw ConfigError("needs at least one segment", "schedule.segments");
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& seg = segments[i];
        const std::string path = "schedule.segments[" + std::to_string(i) + "]";
        if (!std::isfinite(seg.t_start)) throw ConfigError("t_start must be finite", path);
        if (!(seg.p_mean >= 0.0) || !std::isfinite(seg.p_mean))
            throw ConfigError("p_mean must be finite and >= 0", path);
        if (!(seg.noise >= 0.0) || !std::isfinite(seg.noise))
            throw ConfigError("noise must be finite and >= 0", path);
        if (i > 0 && !(seg.t_start > segments[i - 1].t_start))
            throw ConfigError("t_start must be strictly increasing", path);
    }
    NoiseSchedule s;
    s.kind_ = Kind::piecewise;
    s.segments_ = std::move(segments);
    return s;
}

NoiseSchedule NoiseSchedule::pseudo_solar(const SolarConfig& config, std::uint64_t seed) {
    config.validate();
    NoiseSchedule s;
    s.kind_ = Kind::pseudo_solar;
    s.seed_ = seed;
    s.solar_ = config;

    // Exact OU update on the grid; the stationary start keeps the envelope
    // statistically homogeneous in time.
    const auto n = static_cast<std::size_t>(std::ceil(config.horizon / config.grid_dt)) + 1;
    const double decay = std::exp(-config.grid_dt / config.cloud_relaxation);
    const double kick = config.cloud_std * std::sqrt(1.0 - decay * decay);
    NormalSource normal(seed, 0xC10D);
    s.envelope_.resize(n);
    double level = config.cloud_mean + config.cloud_std * normal();
    for (std::size_t i = 0; i < n; ++i) {
        s.envelope_[i] = std::clamp(level, 0.0, 1.0);
        level = config.cloud_mean + (level - config.cloud_mean) * decay + kick * normal();
    }
    return s;
}

const ScheduleSegment& NoiseSchedule::segment_at(double t) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double tt, const ScheduleSegment& seg) { return tt < seg.t_start; });
    if (it == segments_.begin()) return segments_.front();
    return *(it - 1);
}

double NoiseSchedule::cloud(double t) const {
    if (kind_ != Kind::pseudo_solar) return 0.0;
    const double pos = std::max(0.0, t / solar_.grid_dt + 1e-9);
    const auto idx = std::min(static_cast<std::size_t>(pos), envelope_.size() - 1);
    return envelope_[idx];
}

double NoiseSchedule::p_mean(double t) const {
    if (kind_ == Kind::pseudo_solar) {
        const double phase = 2.0 * std::numbers::pi * t / solar_.day_length;
        return std::max(0.0, solar_.peak_power * std::sin(phase));
    }
    return segment_at(t).p_mean;
}

double NoiseSchedule::noise(double t) const {
    if (kind_ == Kind::pseudo_solar) return solar_.d_base + solar_.d_cloud * cloud(t);
    return segment_at(t).noise;
}

double NoiseSchedule::horizon() const noexcept {
    if (kind_ == Kind::pseudo_solar) return solar_.horizon;
    return std::numeric_limits<double>::infinity();
}

}  // namespace ratchet
