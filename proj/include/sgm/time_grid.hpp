#pragma once

#include <cstddef>

namespace sgm {

/// Uniform discretization of [0, T] into N steps of size h = T / N.
class TimeGrid {
public:
    /// Throws std::invalid_argument unless horizon > 0 and steps >= 1.
    TimeGrid(double horizon, std::size_t steps);

    double horizon() const noexcept { return horizon_; }
    std::size_t steps() const noexcept { return steps_; }
    double step_size() const noexcept { return h_; }

    /// Grid time k*h.
    double time(std::size_t k) const noexcept { return static_cast<double>(k) * h_; }
    /// Reverse time T - k*h, the time at which a reverse sampler evaluates the score at step k.
    double reverse_time(std::size_t k) const noexcept { return horizon_ - time(k); }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double horizon_;
    std::size_t steps_;
    double h_;
};

} // namespace sgm
