#pragma once

#include "sgm/gaussian.hpp"
#include "sgm/parallel.hpp"
#include "sgm/trajectory.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace sgm {

/// Data spread uniformly on the diagonal segment {(s, .., s) : s in [-half_width, half_width]}
/// plus isotropic N(0, jitter_var) noise. The y = x toy dataset is the d = 2 case.
struct DiagonalSegmentLaw {
    std::size_t dim = 2;
    double half_width = 2.0;
    double jitter_var = kVarFloor;

    friend bool operator==(const DiagonalSegmentLaw&, const DiagonalSegmentLaw&) = default;
};

enum class Perturbation { constant_offset, random_direction };

std::string to_string(Perturbation mode);
/// Throws std::invalid_argument for unknown names.
Perturbation parse_perturbation(const std::string& name);

/// Per-coordinate affine form score_i(x) = slope_i * x_i + intercept_i.
struct AffineScore {
    std::vector<double> slope;
    std::vector<double> intercept;
};

/// Score function t, x -> grad log q_t(x) for the forward OU marginals of a data law, optionally
/// perturbed by a vector of fixed L2 norm eps. Immutable; safe to share across threads.
class ScoreModel {
public:
    /// Exact score of the OU marginals of a Gaussian data law.
    static ScoreModel exact(GaussianSpec q0);
    /// Exact score of the OU marginals of a diagonal-segment data law.
    static ScoreModel exact(DiagonalSegmentLaw data);

    std::size_t dim() const noexcept;
    bool is_exact() const noexcept { return eps_ == 0.0; }
    double eps() const noexcept { return eps_; }
    Perturbation perturbation() const noexcept { return mode_; }
    /// The data law when it is Gaussian, otherwise nullptr.
    const GaussianSpec* gaussian_data() const noexcept { return std::get_if<GaussianSpec>(&data_); }

    /// Writes score(t, x) into out. Throws std::invalid_argument for t < 0 and NumericError for
    /// non-finite input.
    void evaluate(double t, std::span<const double> x, std::span<double> out) const;
    std::vector<double> operator()(double t, std::span<const double> x) const;

    /// The unperturbed score at (t, x).
    void evaluate_exact(double t, std::span<const double> x, std::span<double> out) const;

    /// Coefficients of the score at time t when it is affine in x (Gaussian data), else nullopt.
    std::optional<AffineScore> affine_at(double t) const;

    /// Perturbation vector added at time t (zero for exact models).
    std::vector<double> offset_at(double t) const;

private:
    friend ScoreModel perturbed_score(const ScoreModel&, double, Perturbation, std::uint64_t, double);

    using DataLaw = std::variant<GaussianSpec, DiagonalSegmentLaw>;
    explicit ScoreModel(DataLaw data) : data_(std::move(data)) {}

    void add_offset(double t, std::span<double> out) const;

    DataLaw data_;
    double eps_ = 0.0;
    Perturbation mode_ = Perturbation::constant_offset;
    std::uint64_t seed_ = 0;
    double bucket_width_ = 1.0;
};

/// Coordinatewise (mu_t - x) / sigma_t^2 with (mu_t, sigma_t^2) = forward_marginal(q0, t).
std::vector<double> exact_score(const GaussianSpec& q0, double t, std::span<const double> x);

/// Score whose pointwise deviation from `base` has L2 norm exactly eps. constant_offset uses the
/// fixed direction (1, .., 1)/sqrt(d); random_direction draws a unit direction from (seed, bucket)
/// where bucket = round(t / bucket_width), so it is piecewise constant on the sampler's grid.
/// Throws std::invalid_argument if base is already perturbed, eps < 0 or bucket_width <= 0.
ScoreModel perturbed_score(const ScoreModel& base, double eps, Perturbation mode, std::uint64_t seed,
                           double bucket_width);

/// Monte Carlo estimate of E||a - b||^2 over every drift-evaluation state x_k (k < N) of the
/// batch, scored at reverse time T - k h. The standard error uses per-path averages.
/// Throws std::invalid_argument on an empty batch or dimension mismatch.
MeanEstimate score_error_norm(const ScoreModel& a, const ScoreModel& b, const PathBatch& paths);

} // namespace sgm
