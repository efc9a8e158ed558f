#include "sgm/metrics.hpp"

#include "sgm/philox.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sgm {

namespace {

constexpr std::uint32_t kTvStream = 0x7F000001u;

void require_same_dim(const GaussianSpec& p, const GaussianSpec& q, const char* what)
{
    if (p.dim() != q.dim()) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
}

// Standard normal mass on [a, b], a <= b, without cancellation in either tail.
double normal_mass(double a, double b)
{
    constexpr double k = 1.0 / std::numbers::sqrt2;
    if (a >= 0.0) return 0.5 * (std::erfc(a * k) - std::erfc(b * k));
    if (b <= 0.0) return 0.5 * (std::erfc(-b * k) - std::erfc(-a * k));
    return 1.0 - 0.5 * std::erfc(b * k) - 0.5 * std::erfc(-a * k);
}

void require_nonnegative(double v, const char* what)
{
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + ": argument must be finite and >= 0");
    }
}

} // namespace

double gaussian_kl(const GaussianSpec& p, const GaussianSpec& q)
{
    require_same_dim(p, q, "gaussian_kl");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.dim(); ++i) {
        const double ratio = p.var()[i] / q.var()[i];
        const double shift = p.mean()[i] - q.mean()[i];
        acc += 0.5 * (ratio + shift * shift / q.var()[i] - 1.0 - std::log(ratio));
    }
    return acc;
}

double gaussian_w2(const GaussianSpec& p, const GaussianSpec& q)
{
    require_same_dim(p, q, "gaussian_w2");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.dim(); ++i) {
        const double dm = p.mean()[i] - q.mean()[i];
        const double ds = std::sqrt(p.var()[i]) - std::sqrt(q.var()[i]);
        acc += dm * dm + ds * ds;
    }
    return std::sqrt(acc);
}

double gaussian_tv_1d(const GaussianSpec& p, const GaussianSpec& q)
{
    if (p.dim() != 1 || q.dim() != 1) {
        throw std::invalid_argument("gaussian_tv_1d: both distributions must be one-dimensional");
    }
    const double m1 = p.mean()[0];
    const double m2 = q.mean()[0];
    const double v1 = p.var()[0];
    const double v2 = q.var()[0];
    if (v1 == v2) {
        return std::erf(std::abs(m1 - m2) / (2.0 * std::numbers::sqrt2 * std::sqrt(v1)));
    }
    // log p - log q = a x^2 + b x + c has two real roots when the variances differ.
    const double a = 0.5 / v2 - 0.5 / v1;
    const double b = m1 / v1 - m2 / v2;
    const double c = 0.5 * m2 * m2 / v2 - 0.5 * m1 * m1 / v1 + 0.5 * std::log(v2 / v1);
    const double disc = std::max(0.0, b * b - 4.0 * a * c);
    const double half = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    double lo = half / a;
    double hi = half == 0.0 ? -lo : c / half;
    if (lo > hi) std::swap(lo, hi);
    const double s1 = std::sqrt(v1);
    const double s2 = std::sqrt(v2);
    const double p_mid = normal_mass((lo - m1) / s1, (hi - m1) / s1);
    const double q_mid = normal_mass((lo - m2) / s2, (hi - m2) / s2);
    return std::min(1.0, std::abs(p_mid - q_mid));
}

MeanEstimate gaussian_tv(const GaussianSpec& p, const GaussianSpec& q, std::size_t n_samples, std::uint64_t seed)
{
    require_same_dim(p, q, "gaussian_tv");
    if (p.dim() == 1) {
        return {gaussian_tv_1d(p, q), 0.0, 0};
    }
    if (n_samples < 2) {
        throw std::invalid_argument("gaussian_tv: need at least two samples");
    }
    const NormalStream rng(seed, kTvStream);
    std::vector<double> values(n_samples);
    std::vector<double> x(p.dim());
    for (std::size_t s = 0; s < n_samples; ++s) {
        rng.fill(static_cast<std::uint32_t>(s), 0, x);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = p.mean()[i] + std::sqrt(p.var()[i]) * x[i];
        const double ratio = std::exp(q.log_density(x) - p.log_density(x));
        values[s] = std::max(0.0, 1.0 - ratio);
    }
    return mean_with_stderr(values);
}

double empirical_w2_1d(std::span<const double> samples_a, std::span<const double> samples_b)
{
    if (samples_a.size() != samples_b.size()) {
        throw std::invalid_argument("empirical_w2_1d: sample sizes differ");
    }
    if (samples_a.size() < 2) {
        throw std::invalid_argument("empirical_w2_1d: need at least two samples");
    }
    std::vector<double> a(samples_a.begin(), samples_a.end());
    std::vector<double> b(samples_b.begin(), samples_b.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<double> sq(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        sq[i] = diff * diff;
    }
    return std::sqrt(pairwise_sum(sq) / static_cast<double>(sq.size()));
}

double empirical_w2_to_gaussian_1d(std::span<const double> samples, double mean, double var)
{
    const std::size_t n = samples.size();
    std::vector<double> reference(n);
    const double sd = std::sqrt(var);
    for (std::size_t i = 0; i < n; ++i) {
        reference[i] = mean + sd * normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
    }
    return empirical_w2_1d(samples, reference);
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -INFINITY;
        if (p == 1.0) return INFINITY;
        throw std::invalid_argument("normal_quantile: p outside [0, 1]");
    }
    // Acklam's rational approximation.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x = 0.0;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement against erfc.
    for (int iter = 0; iter < 2; ++iter) {
        const double err =
            x < 0.0 ? normal_cdf(x) - p : (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
        const double u = err * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double pinsker_bound(double kl)
{
    require_nonnegative(kl, "pinsker_bound");
    return std::sqrt(0.5 * kl);
}

double talagrand_bound(double kl_to_gamma)
{
    require_nonnegative(kl_to_gamma, "talagrand_bound");
    return std::sqrt(2.0 * kl_to_gamma);
}

std::vector<ContractionRow> contraction_check(const GaussianSpec& q0, std::span<const double> times)
{
    const GaussianSpec gamma = GaussianSpec::standard(q0.dim());
    const double initial = gaussian_w2(q0, gamma);
    std::vector<ContractionRow> rows;
    rows.reserve(times.size());
    for (double t : times) {
        if (!(t >= 0.0)) {
            throw std::invalid_argument("contraction_check: times must be >= 0");
        }
        ContractionRow row;
        row.t = t;
        row.lhs = gaussian_w2(forward_marginal(q0, t), gamma);
        row.rhs = std::exp(-t) * initial;
        row.ok = row.lhs <= row.rhs * (1.0 + 1e-9);
        rows.push_back(row);
    }
    return rows;
}

BoundReport composite_tv_bound(double horizon, double eps, double kl_q_gamma, double c_score, double c_init)
{
    require_nonnegative(horizon, "composite_tv_bound");
    require_nonnegative(eps, "composite_tv_bound");
    require_nonnegative(kl_q_gamma, "composite_tv_bound");
    require_nonnegative(c_score, "composite_tv_bound");
    require_nonnegative(c_init, "composite_tv_bound");
    BoundReport report;
    report.tv_score_term = c_score * std::sqrt(horizon) * eps;
    report.tv_init_term = c_init * std::exp(-horizon) * std::sqrt(2.0 * kl_q_gamma);
    report.tv_total_bound = report.tv_score_term + report.tv_init_term;
    return report;
}

BoundReport with_measurement(BoundReport report, double measured_tv)
{
    if (!(measured_tv >= 0.0 && measured_tv <= 1.0)) {
        throw std::invalid_argument("with_measurement: TV must lie in [0, 1]");
    }
    report.measured_tv = measured_tv;
    report.satisfied = measured_tv <= report.tv_total_bound;
    return report;
}

double histogram_tv_1d(std::span<const double> samples, double mean, double var, std::size_t bins)
{
    if (samples.empty() || bins == 0) {
        throw std::invalid_argument("histogram_tv_1d: need samples and at least one bin");
    }
    const double sd = std::sqrt(var);
    const double lo = mean - 6.0 * sd;
    const double width = 12.0 * sd / static_cast<double>(bins);
    // Slots 0 and bins + 1 hold the two tails.
    std::vector<double> counts(bins + 2, 0.0);
    for (double x : samples) {
        const double pos = (x - lo) / width;
        std::size_t slot = 0;
        if (pos >= static_cast<double>(bins)) {
            slot = bins + 1;
        } else if (pos >= 0.0) {
            slot = static_cast<std::size_t>(pos) + 1;
        }
        counts[slot] += 1.0;
    }
    const auto n = static_cast<double>(samples.size());
    std::vector<double> gaps(bins + 2);
    gaps[0] = std::abs(counts[0] / n - normal_cdf(-6.0));
    gaps[bins + 1] = std::abs(counts[bins + 1] / n - normal_cdf(-6.0));
    for (std::size_t j = 0; j < bins; ++j) {
        const double a = (lo + width * static_cast<double>(j) - mean) / sd;
        const double b = (lo + width * static_cast<double>(j + 1) - mean) / sd;
        gaps[j + 1] = std::abs(counts[j + 1] / n - normal_mass(a, b));
    }
    return 0.5 * pairwise_sum(gaps);
}

} // namespace sgm
