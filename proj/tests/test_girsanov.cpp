#include <gtest/gtest.h>

#include "sgm/drift.hpp"
#include "sgm/girsanov.hpp"
#include "sgm/simulate.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace sgm;

namespace {

// Independent oracle: sum over steps of log N(x_{k+1}; x_k + h b, 2h I) - log N(x_{k+1}; x_k + h b', 2h I).
double transition_log_ratio(const Trajectory& traj, const DriftField& b, const DriftField& b_prime)
{
    const double h = traj.grid().step_size();
    const double var = 2.0 * h;
    double total = 0.0;
    for (std::size_t k = 0; k < traj.steps(); ++k) {
        const auto x = traj.state(k);
        const auto next = traj.state(k + 1);
        const auto bk = b(k, x);
        const auto bp = b_prime(k, x);
        for (std::size_t i = 0; i < traj.dim(); ++i) {
            const double r = next[i] - (x[i] + h * bk[i]);
            const double rp = next[i] - (x[i] + h * bp[i]);
            const double log_p = -0.5 * r * r / var - 0.5 * std::log(2.0 * std::numbers::pi * var);
            const double log_q = -0.5 * rp * rp / var - 0.5 * std::log(2.0 * std::numbers::pi * var);
            total += log_p - log_q;
        }
    }
    return total;
}

DriftField wobble(std::size_t dim)
{
    return DriftField("wobble", dim, [](std::size_t k, std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::sin(x[i]) + 0.01 * static_cast<double>(k) - 0.5 * x[i];
    });
}

double r_squared(const std::vector<double>& xs, const std::vector<double>& ys)
{
    const auto n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / n;
        my += ys[i] / n;
    }
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    return sxy * sxy / (sxx * syy);
}

} // namespace

TEST(LogLikelihoodRatio, IdenticalDriftsGiveZero)
{
    const TimeGrid grid(1.0, 20);
    const PathBatch batch = simulate_batch(GaussianSpec::standard(2), wobble(2), grid, 3, 1, Scheme::forward);
    const LogLikelihoodRatio llr = log_likelihood_ratio(batch.paths[0], wobble(2), wobble(2));
    EXPECT_EQ(llr.total, 0.0);
    for (double v : llr.per_step) EXPECT_EQ(v, 0.0);
}

TEST(LogLikelihoodRatio, SingleStepMatchesTransitionDensities)
{
    // h = 1, b = 1, b' = 0, g = 0: the realized step is x0 + h b.
    const TimeGrid grid(1.0, 1);
    const Trajectory traj(grid, 1, {0.0, 1.0}, {0.0});
    const DriftField b = DriftField::constant({1.0});
    const DriftField b_prime = DriftField::constant({0.0});
    const LogLikelihoodRatio llr = log_likelihood_ratio(traj, b, b_prime);
    EXPECT_NEAR(transition_log_ratio(traj, b, b_prime), 0.25, 1e-15);
    EXPECT_NEAR(llr.total, 0.25, 1e-15);
    EXPECT_EQ(llr.cross_total, 0.0);
}

TEST(LogLikelihoodRatio, MatchesTransitionOracleOnRandomPaths)
{
    const TimeGrid grid(1.0, 50);
    for (std::size_t dim : {1u, 2u}) {
        const DriftField b = wobble(dim);
        const DriftField b_prime = DriftField::ou(dim);
        const PathBatch batch = simulate_batch(GaussianSpec::isotropic(dim, 0.5, 2.0), b, grid, 50, 40 + dim, Scheme::forward);
        for (const Trajectory& path : batch.paths) {
            const LogLikelihoodRatio llr = log_likelihood_ratio(path, b, b_prime);
            EXPECT_NEAR(llr.total, transition_log_ratio(path, b, b_prime), 1e-8);
            double sum = 0.0;
            for (double v : llr.per_step) sum += v;
            EXPECT_NEAR(llr.total, sum, 1e-10 * std::max(1.0, std::abs(sum)));
            EXPECT_NEAR(llr.total, llr.drift_total + llr.cross_total, 1e-12);
        }
    }
}

TEST(LogLikelihoodRatio, RejectsMismatchedGrid)
{
    const TimeGrid grid(1.0, 10);
    const ScoreModel score = ScoreModel::exact(GaussianSpec::standard(1));
    const DriftField rev = DriftField::reverse(score, TimeGrid(1.0, 20));
    const Trajectory traj(grid, 1);
    EXPECT_THROW(log_likelihood_ratio(traj, rev, rev), std::invalid_argument);
    EXPECT_THROW(log_likelihood_ratio(traj, DriftField::ou(2), DriftField::ou(2)), std::invalid_argument);
}

TEST(KlDriftFormula, ConstantMismatchIsClosedForm)
{
    const TimeGrid grid(1.0, 100);
    const DriftField b = DriftField::ou(1);
    const DriftField b_prime = DriftField::shifted(b, {0.2});
    const PathBatch batch = simulate_batch(GaussianSpec::standard(1), b, grid, 500, 2, Scheme::forward);
    const KlEstimate est = kl_drift_formula(batch, b, b_prime);
    EXPECT_NEAR(est.value, 100 * 0.01 * 0.04 / 4.0, 1e-12);
    EXPECT_NEAR(est.std_error, 0.0, 1e-12);
    EXPECT_EQ(est.n_paths, 500u);
    ASSERT_EQ(est.per_step_profile.size(), 100u);

    const KlEstimate none = kl_drift_formula(batch, b, b);
    EXPECT_EQ(none.value, 0.0);
    EXPECT_EQ(none.std_error, 0.0);
}

TEST(KlDriftFormula, ScalesQuadraticallyWithMismatch)
{
    const TimeGrid grid(1.0, 40);
    const DriftField b = wobble(2);
    const PathBatch batch = simulate_batch(GaussianSpec::standard(2), b, grid, 300, 6, Scheme::forward);
    const double base = kl_drift_formula(batch, b, DriftField::shifted(b, {0.1, -0.3})).value;
    for (double c : {2.0, 3.0, 0.5}) {
        const double scaled = kl_drift_formula(batch, b, DriftField::shifted(b, {0.1 * c, -0.3 * c})).value;
        EXPECT_NEAR(scaled, c * c * base, 1e-12 * c * c * base);
    }
}

TEST(KlEstimators, AgreeForStateDependentMismatch)
{
    const TimeGrid grid(1.0, 50);
    const DriftField b = wobble(2);
    const DriftField b_prime = DriftField::ou(2);
    const PathBatch batch = simulate_batch(GaussianSpec::isotropic(2, 0.0, 1.5), b, grid, 10000, 77, Scheme::forward);
    const KlEstimate formula = kl_drift_formula(batch, b, b_prime);
    const KlEstimate mc = kl_monte_carlo(batch, b, b_prime);
    EXPECT_GT(formula.value, 0.0);
    EXPECT_GT(formula.std_error, 0.0);
    const double combined = std::hypot(formula.std_error, mc.std_error);
    EXPECT_NEAR(formula.value, mc.value, 3.0 * combined);
    EXPECT_GE(mc.value, -3.0 * mc.std_error);
    // Profile is non-decreasing when the mismatch never vanishes.
    for (std::size_t k = 1; k < formula.per_step_profile.size(); ++k) {
        EXPECT_GE(formula.per_step_profile[k], formula.per_step_profile[k - 1]);
    }
}

TEST(KlMonteCarlo, ConstantMismatchAndCrossTerm)
{
    const TimeGrid grid(1.0, 100);
    const DriftField b = DriftField::ou(1);
    const DriftField b_prime = DriftField::shifted(b, {0.2});
    const PathBatch batch = simulate_batch(GaussianSpec::standard(1), b, grid, 20000, 13, Scheme::forward);
    const KlEstimate mc = kl_monte_carlo(batch, b, b_prime);
    EXPECT_NEAR(mc.value, 0.01, 3.0 * mc.std_error);
    const MeanEstimate cross = cross_term_mean(batch, b, b_prime);
    EXPECT_NEAR(cross.value, 0.0, 3.0 * cross.std_error);
    // Variance of the martingale sum is (1/2) sum_k h |Db|^2 = 0.02.
    EXPECT_NEAR(cross.std_error, std::sqrt(0.02 / 20000.0), 0.05 * std::sqrt(0.02 / 20000.0));

    const KlEstimate none = kl_monte_carlo(batch, b, b);
    EXPECT_EQ(none.value, 0.0);
    EXPECT_EQ(none.std_error, 0.0);
}

TEST(CumulativeKlProfile, LinearUnderConstantMismatch)
{
    const TimeGrid grid(1.0, 100);
    const DriftField b = DriftField::ou(1);
    const PathBatch batch = simulate_batch(GaussianSpec::standard(1), b, grid, 50, 3, Scheme::forward);
    const double delta = 0.2;
    const auto profile = cumulative_kl_profile(batch, b, DriftField::shifted(b, {delta}));
    ASSERT_EQ(profile.size(), 101u);
    std::vector<double> times(101);
    for (std::size_t k = 0; k <= 100; ++k) {
        times[k] = grid.time(k);
        EXPECT_NEAR(profile[k], static_cast<double>(k) * grid.step_size() * delta * delta / 4.0, 1e-14);
    }
    EXPECT_GE(r_squared(times, profile), 0.999);
    const auto zero = cumulative_kl_profile(batch, b, b);
    for (double v : zero) EXPECT_EQ(v, 0.0);
}

TEST(KlDriftFormula, ReverseSamplersWithScoreErrorGrowLinearlyInHorizon)
{
    // A score error eps enters the reverse drift x + 2 s as 2 eps, so KL = T (2 eps)^2 / 4 = T eps^2.
    const GaussianSpec q0({2.0}, {4.0});
    const double eps = 0.2;
    for (double horizon : {1.0, 2.0}) {
        const TimeGrid grid(horizon, static_cast<std::size_t>(100 * horizon));
        const ScoreModel exact = ScoreModel::exact(q0);
        const ScoreModel pert = perturbed_score(exact, eps, Perturbation::constant_offset, 0, grid.step_size());
        const DriftField p_drift = DriftField::reverse(pert, grid);
        const DriftField q_drift = DriftField::reverse(exact, grid);
        const PathBatch batch = simulate_batch(forward_marginal(q0, horizon), p_drift, grid, 200, 9, Scheme::em);
        EXPECT_NEAR(kl_drift_formula(batch, p_drift, q_drift).value, horizon * eps * eps, 1e-12);
    }
}

TEST(KlEstimators, EmptyBatchThrows)
{
    const TimeGrid grid(1.0, 10);
    const PathBatch empty{grid, 1, 0, {}};
    EXPECT_THROW(kl_drift_formula(empty, DriftField::ou(1), DriftField::ou(1)), std::invalid_argument);
    EXPECT_THROW(kl_monte_carlo(empty, DriftField::ou(1), DriftField::ou(1)), std::invalid_argument);
    EXPECT_THROW(cumulative_kl_profile(empty, DriftField::ou(1), DriftField::ou(1)), std::invalid_argument);
}

TEST(MeanSquaredDriftMismatch, ConstantShift)
{
    const TimeGrid grid(1.0, 10);
    const DriftField b = DriftField::ou(2);
    const PathBatch batch = simulate_batch(GaussianSpec::standard(2), b, grid, 10, 3, Scheme::forward);
    for (double v : mean_squared_drift_mismatch(batch, b, DriftField::shifted(b, {0.3, 0.4}))) {
        EXPECT_NEAR(v, 0.25, 1e-12);
    }
}
