#include "sgm/score.hpp"

#include "sgm/errors.hpp"
#include "sgm/philox.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <type_traits>

namespace sgm {

namespace {

constexpr std::uint32_t kDirectionStream = 0x5C0E0001u;

void require_finite(std::span<const double> x)
{
    for (double v : x) {
        if (!std::isfinite(v)) throw NumericError("score: non-finite state");
    }
}

// log of the upper normal tail Q(x) = P(Z > x).
double log_upper_tail(double x)
{
    if (x < 30.0) {
        return std::log(0.5 * std::erfc(x / std::numbers::sqrt2));
    }
    const double inv2 = 1.0 / (x * x);
    return -0.5 * x * x - std::log(x * std::sqrt(2.0 * std::numbers::pi)) +
           std::log1p(-inv2 + 3.0 * inv2 * inv2 - 15.0 * inv2 * inv2 * inv2);
}

double log_normal_pdf(double x)
{
    return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
}

// d/dz log p(z) for p = Uniform[-w, w] convolved with N(0, sigma^2).
double smoothed_uniform_score(double z, double w, double sigma)
{
    if (z < 0.0) return -smoothed_uniform_score(-z, w, sigma);
    if (2.0 * w / sigma < 1e-3) {
        // Width negligible against the noise: moment-matched Gaussian.
        return -z / (sigma * sigma + w * w / 3.0);
    }
    const double a = (z + w) / sigma;
    const double b = (z - w) / sigma;
    const double log_qb = log_upper_tail(b);
    const double log_mass = log_qb + std::log(-std::expm1(log_upper_tail(a) - log_qb));
    const double ratio = std::exp(log_normal_pdf(a) - log_mass) - std::exp(log_normal_pdf(b) - log_mass);
    return ratio / sigma;
}

void gaussian_exact(const GaussianSpec& q0, double t, std::span<const double> x, std::span<double> out)
{
    const double decay = std::exp(-t);
    const double decay2 = std::exp(-2.0 * t);
    const double injected = -std::expm1(-2.0 * t);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double mu = q0.mean()[i] * decay;
        const double var = q0.var()[i] * decay2 + injected;
        out[i] = (mu - x[i]) / var;
    }
}

void segment_exact(const DiagonalSegmentLaw& law, double t, std::span<const double> x, std::span<double> out)
{
    const auto d = static_cast<double>(law.dim);
    const double decay = std::exp(-t);
    const double var = law.jitter_var * decay * decay - std::expm1(-2.0 * t);
    const double sigma = std::sqrt(var);
    const double inv_sqrt_d = 1.0 / std::sqrt(d);
    // Coordinate along the diagonal and its half-length after shrinking by e^{-t}.
    double along = 0.0;
    for (double v : x) along += v;
    along *= inv_sqrt_d;
    const double half_length = decay * law.half_width * std::sqrt(d);
    const double along_score = smoothed_uniform_score(along, half_length, sigma);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double perp = x[i] - along * inv_sqrt_d;
        out[i] = -perp / var + along_score * inv_sqrt_d;
    }
}

} // namespace

std::string to_string(Perturbation mode)
{
    return mode == Perturbation::constant_offset ? "constant_offset" : "random_direction";
}

Perturbation parse_perturbation(const std::string& name)
{
    if (name == "constant_offset") return Perturbation::constant_offset;
    if (name == "random_direction") return Perturbation::random_direction;
    throw std::invalid_argument("unknown perturbation mode '" + name + "'");
}

ScoreModel ScoreModel::exact(GaussianSpec q0)
{
    return ScoreModel(DataLaw(std::move(q0)));
}

ScoreModel ScoreModel::exact(DiagonalSegmentLaw data)
{
    if (data.dim == 0 || !(data.half_width > 0.0) || !(data.jitter_var >= kVarFloor)) {
        throw std::invalid_argument("DiagonalSegmentLaw: need dim >= 1, half_width > 0, jitter_var >= var_floor");
    }
    return ScoreModel(DataLaw(data));
}

std::size_t ScoreModel::dim() const noexcept
{
    return std::visit(
        [](const auto& law) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(law)>, GaussianSpec>) {
                return law.dim();
            } else {
                return law.dim;
            }
        },
        data_);
}

void ScoreModel::evaluate_exact(double t, std::span<const double> x, std::span<double> out) const
{
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument("score: time must be finite and >= 0");
    }
    if (x.size() != dim() || out.size() != dim()) {
        throw std::invalid_argument("score: dimension mismatch");
    }
    require_finite(x);
    if (const auto* q0 = std::get_if<GaussianSpec>(&data_)) {
        gaussian_exact(*q0, t, x, out);
    } else {
        segment_exact(std::get<DiagonalSegmentLaw>(data_), t, x, out);
    }
}

void ScoreModel::evaluate(double t, std::span<const double> x, std::span<double> out) const
{
    evaluate_exact(t, x, out);
    add_offset(t, out);
    for (double v : out) {
        if (!std::isfinite(v)) throw NumericError("score: non-finite output");
    }
}

std::vector<double> ScoreModel::operator()(double t, std::span<const double> x) const
{
    std::vector<double> out(dim());
    evaluate(t, x, out);
    return out;
}

std::vector<double> ScoreModel::offset_at(double t) const
{
    std::vector<double> out(dim(), 0.0);
    add_offset(t, out);
    return out;
}

void ScoreModel::add_offset(double t, std::span<double> out) const
{
    if (eps_ == 0.0) return;
    const std::size_t d = out.size();
    if (mode_ == Perturbation::constant_offset) {
        const double step = eps_ / std::sqrt(static_cast<double>(d));
        for (double& v : out) v += step;
        return;
    }
    const auto bucket = static_cast<std::uint32_t>(std::llround(t / bucket_width_));
    std::vector<double> direction(d);
    NormalStream(seed_, kDirectionStream).fill(bucket, 0, direction);
    double norm2 = 0.0;
    for (double v : direction) norm2 += v * v;
    const double scale = eps_ / std::sqrt(norm2);
    for (std::size_t i = 0; i < d; ++i) out[i] += scale * direction[i];
}

std::optional<AffineScore> ScoreModel::affine_at(double t) const
{
    const auto* q0 = std::get_if<GaussianSpec>(&data_);
    if (q0 == nullptr) return std::nullopt;
    const GaussianSpec qt = forward_marginal(*q0, t);
    AffineScore affine{std::vector<double>(dim()), offset_at(t)};
    for (std::size_t i = 0; i < dim(); ++i) {
        affine.slope[i] = -1.0 / qt.var()[i];
        affine.intercept[i] += qt.mean()[i] / qt.var()[i];
    }
    return affine;
}

std::vector<double> exact_score(const GaussianSpec& q0, double t, std::span<const double> x)
{
    std::vector<double> out(q0.dim());
    ScoreModel::exact(q0).evaluate(t, x, out);
    return out;
}

ScoreModel perturbed_score(const ScoreModel& base, double eps, Perturbation mode, std::uint64_t seed,
                           double bucket_width)
{
    if (!base.is_exact()) {
        throw std::invalid_argument("perturbed_score: base model must be exact");
    }
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
        throw std::invalid_argument("perturbed_score: eps must be finite and >= 0");
    }
    if (!(bucket_width > 0.0)) {
        throw std::invalid_argument("perturbed_score: bucket width must be > 0");
    }
    ScoreModel model = base;
    model.eps_ = eps;
    model.mode_ = mode;
    model.seed_ = seed;
    model.bucket_width_ = bucket_width;
    return model;
}

MeanEstimate score_error_norm(const ScoreModel& a, const ScoreModel& b, const PathBatch& paths)
{
    if (paths.empty()) {
        throw std::invalid_argument("score_error_norm: empty batch");
    }
    if (a.dim() != b.dim() || a.dim() != paths.dim) {
        throw std::invalid_argument("score_error_norm: dimension mismatch");
    }
    const TimeGrid& grid = paths.grid;
    std::vector<double> per_path(paths.size());
    std::vector<double> sa(a.dim());
    std::vector<double> sb(a.dim());
    std::vector<double> sq(grid.steps());
    for (std::size_t p = 0; p < paths.size(); ++p) {
        const Trajectory& traj = paths.paths[p];
        for (std::size_t k = 0; k < grid.steps(); ++k) {
            const double t = grid.reverse_time(k);
            a.evaluate(t, traj.state(k), sa);
            b.evaluate(t, traj.state(k), sb);
            double acc = 0.0;
            for (std::size_t i = 0; i < sa.size(); ++i) {
                const double diff = sa[i] - sb[i];
                acc += diff * diff;
            }
            sq[k] = acc;
        }
        per_path[p] = pairwise_sum(sq) / static_cast<double>(grid.steps());
    }
    return mean_with_stderr(per_path);
}

} // namespace sgm
