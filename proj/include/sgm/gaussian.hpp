#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sgm {

/// Smallest admissible per-coordinate variance. Degenerate data gets this much isotropic jitter.
inline constexpr double kVarFloor = 1e-6;

/// Gaussian with diagonal covariance.
class GaussianSpec {
public:
    /// Throws std::invalid_argument on size mismatch, empty vectors, non-finite entries
    /// or any variance below kVarFloor.
    GaussianSpec(std::vector<double> mean, std::vector<double> var);

    /// Standard Gaussian gamma^d.
    static GaussianSpec standard(std::size_t dim);
    /// Same scalar mean and variance in every coordinate.
    static GaussianSpec isotropic(std::size_t dim, double mean, double var);

    std::size_t dim() const noexcept { return mean_.size(); }
    const std::vector<double>& mean() const noexcept { return mean_; }
    const std::vector<double>& var() const noexcept { return var_; }

    /// Log density at x, including the normalizing constant.
    double log_density(std::span<const double> x) const;

    friend bool operator==(const GaussianSpec&, const GaussianSpec&) = default;

private:
    std::vector<double> mean_;
    std::vector<double> var_;
};

/// Closed-form law at time t of the forward OU process dX = -X dt + sqrt(2) dB started from q0:
/// mean e^{-t} mu, variance e^{-2t} var + 1 - e^{-2t}. Throws std::invalid_argument for t < 0.
GaussianSpec forward_marginal(const GaussianSpec& q0, double t);

} // namespace sgm
