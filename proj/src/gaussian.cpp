#include "sgm/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sgm {

GaussianSpec::GaussianSpec(std::vector<double> mean, std::vector<double> var)
    : mean_(std::move(mean)), var_(std::move(var))
{
    if (mean_.empty() || mean_.size() != var_.size()) {
        throw std::invalid_argument("GaussianSpec: mean and var must be non-empty and of equal length");
    }
    for (std::size_t i = 0; i < mean_.size(); ++i) {
        if (!std::isfinite(mean_[i]) || !std::isfinite(var_[i])) {
            throw std::invalid_argument("GaussianSpec: non-finite parameter");
        }
        if (var_[i] < kVarFloor) {
            throw std::invalid_argument("GaussianSpec: variance below var_floor");
        }
    }
}

GaussianSpec GaussianSpec::standard(std::size_t dim)
{
    return isotropic(dim, 0.0, 1.0);
}

GaussianSpec GaussianSpec::isotropic(std::size_t dim, double mean, double var)
{
    return GaussianSpec(std::vector<double>(dim, mean), std::vector<double>(dim, var));
}

double GaussianSpec::log_density(std::span<const double> x) const
{
    if (x.size() != dim()) {
        throw std::invalid_argument("GaussianSpec::log_density: dimension mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        const double z = x[i] - mean_[i];
        acc += -0.5 * (z * z / var_[i] + std::log(2.0 * std::numbers::pi * var_[i]));
    }
    return acc;
}

GaussianSpec forward_marginal(const GaussianSpec& q0, double t)
{
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument("forward_marginal: t must be finite and >= 0");
    }
    const double decay = std::exp(-t);
    const double decay2 = std::exp(-2.0 * t);
    const double injected = -std::expm1(-2.0 * t);
    std::vector<double> mean(q0.dim());
    std::vector<double> var(q0.dim());
    for (std::size_t i = 0; i < q0.dim(); ++i) {
        mean[i] = q0.mean()[i] * decay;
        var[i] = q0.var()[i] * decay2 + injected;
    }
    return GaussianSpec(std::move(mean), std::move(var));
}

} // namespace sgm
