#pragma once

#include "sgm/drift.hpp"
#include "sgm/parallel.hpp"
#include "sgm/trajectory.hpp"

#include <cstddef>
#include <vector>

namespace sgm {

/// log P(X)/Q(X) for one trajectory, where P and Q are the Euler-Maruyama path laws with drifts
/// b and b' and common diffusion sqrt(2). With Db_k = b_k(x_k) - b'_k(x_k) and g_k the noise that
/// generated step k under b:
///   per_step[k] = (h/4) |Db_k|^2 + (1/sqrt 2) <sqrt(h) g_k, Db_k>
/// The first part is the drift term (drift_terms), the second the zero-mean martingale term
/// (cross_terms). Gaussian normalizers cancel and are never formed.
struct LogLikelihoodRatio {
    std::vector<double> per_step;
    std::vector<double> drift_terms;
    std::vector<double> cross_terms;
    double total = 0.0;
    double drift_total = 0.0;
    double cross_total = 0.0;
};

/// Throws std::invalid_argument on dimension or grid mismatch between the trajectory and drifts.
LogLikelihoodRatio log_likelihood_ratio(const Trajectory& traj, const DriftField& b, const DriftField& b_prime);

/// KL between path measures with standard error and cumulative profile.
struct KlEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    /// per_step_profile[k] = estimate of the KL accumulated over steps 0..k.
    std::vector<double> per_step_profile;
    /// Standard error of each profile entry.
    std::vector<double> profile_std_error;
};

/// KL(P || Q) = E_P[ 1/4 sum_k h |b_k - b'_k|^2 ], averaged over a batch simulated under b.
/// Throws std::invalid_argument on an empty batch.
KlEstimate kl_drift_formula(const PathBatch& batch, const DriftField& b, const DriftField& b_prime,
                            int threads = 0);

/// KL(P || Q) = E_P[ log P/Q ] from the full log likelihood ratio, cross term included.
KlEstimate kl_monte_carlo(const PathBatch& batch, const DriftField& b, const DriftField& b_prime, int threads = 0);

/// Batch average of the martingale sum (1/sqrt 2) sum_k <sqrt(h) g_k, Db_k>; zero-mean under P.
MeanEstimate cross_term_mean(const PathBatch& batch, const DriftField& b, const DriftField& b_prime,
                             int threads = 0);

/// kl_drift_formula's profile with a leading 0, i.e. N + 1 values indexed by grid step.
std::vector<double> cumulative_kl_profile(const PathBatch& batch, const DriftField& b, const DriftField& b_prime,
                                          int threads = 0);

/// Batch mean of |b_k(x_k) - b'_k(x_k)|^2 for every step k < N.
std::vector<double> mean_squared_drift_mismatch(const PathBatch& batch, const DriftField& b,
                                                const DriftField& b_prime, int threads = 0);

} // namespace sgm
