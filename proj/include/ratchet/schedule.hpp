#pragma once

// Time-dependent supply: mean power P(t) and environmental noise D(t).

#include <cstdint>
#include <vector>

namespace ratchet {

struct ScheduleSegment {
    double t_start = 0.0;
    double p_mean = 1.0;
    double noise = 0.0;

    friend bool operator==(const ScheduleSegment&, const ScheduleSegment&) = default;
};

struct SolarConfig {
    double peak_power = 1.0;     // P0
    double day_length = 10.0;    // T_day
    double d_base = 0.5;
    double d_cloud = 3.0;
    double cloud_relaxation = 0.5;  // OU relaxation time, default 0.05 T_day
    double cloud_std = 0.5;         // stationary std of the unclipped OU process
    double cloud_mean = 0.0;
    double grid_dt = 1e-3;          // sampling grid for the cloud envelope
    double horizon = 10.0;          // envelope is generated on [0, horizon]

    void validate() const;

    friend bool operator==(const SolarConfig&, const SolarConfig&) = default;
};

class NoiseSchedule {
public:
    enum class Kind { constant, piecewise, pseudo_solar };

    static NoiseSchedule constant(double p_mean, double noise);
    /// Segments must be sorted by t_start; the first one covers t < its start too.
    static NoiseSchedule piecewise(std::vector<ScheduleSegment> segments);
    static NoiseSchedule pseudo_solar(const SolarConfig& config, std::uint64_t seed);

    [[nodiscard]] double p_mean(double t) const;
    [[nodiscard]] double noise(double t) const;
    /// Clipped cloud envelope c(t) in [0, 1]; zero for non-solar schedules.
    [[nodiscard]] double cloud(double t) const;

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    /// Largest time for which the schedule is defined (infinite unless solar).
    [[nodiscard]] double horizon() const noexcept;

private:
    NoiseSchedule() = default;
    [[nodiscard]] const ScheduleSegment& segment_at(double t) const;

    Kind kind_ = Kind::constant;
    std::uint64_t seed_ = 0;
    std::vector<ScheduleSegment> segments_;
    SolarConfig solar_;
    std::vector<double> envelope_;
};

}  // namespace ratchet
