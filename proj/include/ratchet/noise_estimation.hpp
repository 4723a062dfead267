#pragma once

// Online noise-intensity estimator. Keeps the last W + 1 energy samples and
// reports the window average of squared increments scaled by 1 / (2 dt):
//
//   D_hat = < (x_k - x_{k-1})^2 >_W / (2 dt)
//
// No mean subtraction: a deterministic drift v adds v^2 dt / 2 to the
// estimate. Until the window fills, all available increments are used.

#include <cstddef>
#include <vector>

namespace ratchet {

struct EstimatorConfig {
    std::size_t window_len = 100;
    /// Sampling interval between pushed samples (time units).
    double dt = 1e-3;

    void validate() const;

    friend bool operator==(const EstimatorConfig&, const EstimatorConfig&) = default;
};

class EstimatorState {
public:
    explicit EstimatorState(EstimatorConfig config = {});

    /// Appends a sample; rejects non-finite values with DomainError.
    void push_sample(double x);

    /// Throws InsufficientSamplesError before two samples have been pushed.
    [[nodiscard]] double current_estimate() const;

    [[nodiscard]] bool ready() const noexcept { return count_ >= 2; }
    [[nodiscard]] std::size_t sample_count() const noexcept { return count_; }
    [[nodiscard]] std::size_t increment_count() const noexcept { return n_increments_; }
    [[nodiscard]] const EstimatorConfig& config() const noexcept { return config_; }

private:
    void recompute_sum();

    EstimatorConfig config_;
    std::vector<double> ring_;  // last W + 1 samples
    std::size_t head_ = 0;      // index of the most recent sample
    std::size_t count_ = 0;     // samples pushed in total
    std::size_t n_increments_ = 0;
    double sum_sq_ = 0.0;
    std::size_t since_resync_ = 0;
    double d_hat_ = 0.0;
};

}  // namespace ratchet
