#include "ratchet/noise_estimation.hpp"

#include <algorithm>
#include <cmath>

#include "ratchet/errors.hpp"

namespace ratchet {

void EstimatorConfig::validate() const {
    if (window_len < 1) throw ConfigError("must be >= 1", "estimator.window_len");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("must be > 0", "estimator.sample_interval");
}

EstimatorState::EstimatorState(EstimatorConfig config) : config_(config) {
    config_.validate();
    ring_.assign(config_.window_len + 1, 0.0);
}

void EstimatorState::push_sample(double x) {
    if (!std::isfinite(x)) throw DomainError("estimator sample must be finite");
    const std::size_t cap = ring_.size();
    if (count_ == 0) {
        ring_[0] = x;
        head_ = 0;
        count_ = 1;
        return;
    }
    const double prev = ring_[head_];
    const double inc = x - prev;
    if (n_increments_ == config_.window_len) {
        // The oldest increment is between the two oldest samples in the ring.
        const std::size_t oldest = (head_ + 1) % cap;
        const std::size_t next = (head_ + 2) % cap;
        const double old_inc = ring_[next] - ring_[oldest];
        sum_sq_ -= old_inc * old_inc;
    } else {
        ++n_increments_;
    }
    head_ = (head_ + 1) % cap;
    ring_[head_] = x;
    ++count_;
    sum_sq_ += inc * inc;

    // Running sums drift under repeated add/subtract; resync once per window.
    if (++since_resync_ >= config_.window_len) recompute_sum();

    d_hat_ = std::max(0.0, sum_sq_ / static_cast<double>(n_increments_)) / (2.0 * config_.dt);
}

void EstimatorState::recompute_sum() {
    const std::size_t cap = ring_.size();
    double s = 0.0;
    std::size_t idx = head_;
    for (std::size_t k = 0; k < n_increments_; ++k) {
        const std::size_t prev = (idx + cap - 1) % cap;
        const double inc = ring_[idx] - ring_[prev];
        s += inc * inc;
        idx = prev;
    }
    sum_sq_ = s;
    since_resync_ = 0;
}

double EstimatorState::current_estimate() const {
    if (count_ < 2) throw InsufficientSamplesError("noise estimate needs at least two samples");
    return d_hat_;
}

}  // namespace ratchet
