#include "sgm/girsanov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sgm {

namespace {

void check_compatible(const TimeGrid& grid, std::size_t dim, const DriftField& b, const DriftField& b_prime)
{
    if (b.dim() != dim || b_prime.dim() != dim) {
        throw std::invalid_argument("girsanov: drift dimension does not match trajectory");
    }
    for (const DriftField* drift : {&b, &b_prime}) {
        if (drift->grid() && !(*drift->grid() == grid)) {
            throw std::invalid_argument("girsanov: drift '" + drift->label() + "' is tied to a different grid");
        }
    }
}

enum class Term { drift, cross, total };

// Row-major n_paths x N matrix of the chosen per-step term.
std::vector<double> per_step_matrix(const PathBatch& batch, const DriftField& b, const DriftField& b_prime,
                                    Term term, int threads)
{
    if (batch.empty()) {
        throw std::invalid_argument("girsanov: empty batch");
    }
    check_compatible(batch.grid, batch.dim, b, b_prime);
    const std::size_t steps = batch.grid.steps();
    std::vector<double> out(batch.size() * steps);
    parallel_for(batch.size(), threads, [&](std::size_t p) {
        const LogLikelihoodRatio llr = log_likelihood_ratio(batch.paths[p], b, b_prime);
        const std::vector<double>& src =
            term == Term::drift ? llr.drift_terms : (term == Term::cross ? llr.cross_terms : llr.per_step);
        std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(p * steps));
    });
    return out;
}

KlEstimate cumulative_estimate(const PathBatch& batch, std::vector<double> matrix)
{
    const std::size_t steps = batch.grid.steps();
    const std::size_t n = batch.size();
    for (std::size_t p = 0; p < n; ++p) {
        double* row = matrix.data() + p * steps;
        for (std::size_t k = 1; k < steps; ++k) row[k] += row[k - 1];
    }
    KlEstimate est;
    est.n_paths = n;
    est.per_step_profile.resize(steps);
    est.profile_std_error.resize(steps);
    std::vector<double> column(n);
    for (std::size_t k = 0; k < steps; ++k) {
        for (std::size_t p = 0; p < n; ++p) column[p] = matrix[p * steps + k];
        const MeanEstimate m = mean_with_stderr(column);
        est.per_step_profile[k] = m.value;
        est.profile_std_error[k] = m.std_error;
    }
    est.value = est.per_step_profile.back();
    est.std_error = est.profile_std_error.back();
    return est;
}

} // namespace

LogLikelihoodRatio log_likelihood_ratio(const Trajectory& traj, const DriftField& b, const DriftField& b_prime)
{
    check_compatible(traj.grid(), traj.dim(), b, b_prime);
    const std::size_t steps = traj.steps();
    const std::size_t d = traj.dim();
    const double h = traj.grid().step_size();
    const double sqrt_h = std::sqrt(h);
    LogLikelihoodRatio out;
    out.per_step.resize(steps);
    out.drift_terms.resize(steps);
    out.cross_terms.resize(steps);
    std::vector<double> bk(d);
    std::vector<double> bk_prime(d);
    for (std::size_t k = 0; k < steps; ++k) {
        b.evaluate(k, traj.state(k), bk);
        b_prime.evaluate(k, traj.state(k), bk_prime);
        const auto g = traj.noise(k);
        double mismatch_sq = 0.0;
        double inner = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double diff = bk[i] - bk_prime[i];
            mismatch_sq += diff * diff;
            inner += sqrt_h * g[i] * diff;
        }
        out.drift_terms[k] = 0.25 * h * mismatch_sq;
        out.cross_terms[k] = inner / std::numbers::sqrt2;
        out.per_step[k] = out.drift_terms[k] + out.cross_terms[k];
    }
    out.total = pairwise_sum(out.per_step);
    out.drift_total = pairwise_sum(out.drift_terms);
    out.cross_total = pairwise_sum(out.cross_terms);
    return out;
}

KlEstimate kl_drift_formula(const PathBatch& batch, const DriftField& b, const DriftField& b_prime, int threads)
{
    return cumulative_estimate(batch, per_step_matrix(batch, b, b_prime, Term::drift, threads));
}

KlEstimate kl_monte_carlo(const PathBatch& batch, const DriftField& b, const DriftField& b_prime, int threads)
{
    return cumulative_estimate(batch, per_step_matrix(batch, b, b_prime, Term::total, threads));
}

MeanEstimate cross_term_mean(const PathBatch& batch, const DriftField& b, const DriftField& b_prime, int threads)
{
    const std::vector<double> matrix = per_step_matrix(batch, b, b_prime, Term::cross, threads);
    const std::size_t steps = batch.grid.steps();
    std::vector<double> per_path(batch.size());
    for (std::size_t p = 0; p < batch.size(); ++p) {
        per_path[p] = pairwise_sum(std::span<const double>(matrix.data() + p * steps, steps));
    }
    return mean_with_stderr(per_path);
}

std::vector<double> cumulative_kl_profile(const PathBatch& batch, const DriftField& b, const DriftField& b_prime,
                                          int threads)
{
    const KlEstimate est = kl_drift_formula(batch, b, b_prime, threads);
    std::vector<double> profile{0.0};
    profile.insert(profile.end(), est.per_step_profile.begin(), est.per_step_profile.end());
    return profile;
}

std::vector<double> mean_squared_drift_mismatch(const PathBatch& batch, const DriftField& b,
                                                const DriftField& b_prime, int threads)
{
    const std::vector<double> matrix = per_step_matrix(batch, b, b_prime, Term::drift, threads);
    const std::size_t steps = batch.grid.steps();
    const double scale = 4.0 / batch.grid.step_size();
    std::vector<double> out(steps);
    std::vector<double> column(batch.size());
    for (std::size_t k = 0; k < steps; ++k) {
        for (std::size_t p = 0; p < batch.size(); ++p) column[p] = matrix[p * steps + k] * scale;
        out[k] = pairwise_sum(column) / static_cast<double>(batch.size());
    }
    return out;
}

} // namespace sgm
