#pragma once

#include "sgm/gaussian.hpp"
#include "sgm/parallel.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sgm {

/// KL(p || q) for diagonal Gaussians, in nats. Throws std::invalid_argument on dimension mismatch.
double gaussian_kl(const GaussianSpec& p, const GaussianSpec& q);

/// W2 for diagonal Gaussians: sqrt(|mu_p - mu_q|^2 + sum_i (sigma_p,i - sigma_q,i)^2).
double gaussian_w2(const GaussianSpec& p, const GaussianSpec& q);

/// Total variation between two 1D Gaussians, exact up to erf rounding. The real line is split at
/// the density crossings (one for equal variances, two otherwise) and the mass difference is
/// summed from the CDFs. Throws std::invalid_argument unless both are one-dimensional.
double gaussian_tv_1d(const GaussianSpec& p, const GaussianSpec& q);

/// Total variation between diagonal Gaussians. Closed form for d = 1 (std_error 0); otherwise the
/// Monte Carlo estimate E_p[(1 - q/p)_+] over n_samples deterministic draws.
MeanEstimate gaussian_tv(const GaussianSpec& p, const GaussianSpec& q, std::size_t n_samples = 200000,
                         std::uint64_t seed = 0);

/// Exact 1D W2 between equal-size samples: RMS difference of the sorted values.
/// Throws std::invalid_argument if sizes differ or are below 2.
double empirical_w2_1d(std::span<const double> samples_a, std::span<const double> samples_b);

/// W2 between a 1D sample and a 1D Gaussian, using the Gaussian's (i + 1/2)/n quantiles as the
/// reference sample.
double empirical_w2_to_gaussian_1d(std::span<const double> samples, double mean, double var);

/// Standard normal quantile, accurate to ~1e-15 (Acklam start + two Halley steps).
double normal_quantile(double p);

/// Standard normal CDF.
double normal_cdf(double x);

/// sqrt(kl / 2). Throws std::invalid_argument for kl < 0.
double pinsker_bound(double kl);

/// sqrt(2 kl). Throws std::invalid_argument for kl < 0.
double talagrand_bound(double kl_to_gamma);

struct ContractionRow {
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = false;
};

/// lhs = W2(q_t, gamma^d), rhs = e^{-t} W2(q0, gamma^d), ok = lhs <= rhs (1 + 1e-9).
/// Throws std::invalid_argument for negative times.
std::vector<ContractionRow> contraction_check(const GaussianSpec& q0, std::span<const double> times);

/// Composite TV bound c_score sqrt(T) eps + c_init e^{-T} sqrt(2 KL(q || gamma^d)), next to the
/// TV actually measured for the sampler.
struct BoundReport {
    double tv_score_term = 0.0;
    double tv_init_term = 0.0;
    double tv_total_bound = 0.0;
    double measured_tv = 0.0;
    bool satisfied = false;
};

/// Fills the bound fields; measured_tv stays 0. Throws std::invalid_argument on negative input.
BoundReport composite_tv_bound(double horizon, double eps, double kl_q_gamma, double c_score = 1.0,
                               double c_init = 1.0);

/// Records a measured TV against a bound report. Throws std::invalid_argument outside [0, 1].
BoundReport with_measurement(BoundReport report, double measured_tv);

/// Model-free TV between a 1D sample and a 1D Gaussian: half the L1 gap between the sample's
/// histogram mass and the Gaussian's mass on `bins` equal bins over mean +/- 6 sd. Tail mass
/// outside the range counts as its own bin.
double histogram_tv_1d(std::span<const double> samples, double mean, double var, std::size_t bins = 60);

} // namespace sgm
