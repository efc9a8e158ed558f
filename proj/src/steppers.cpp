#include "sgm/steppers.hpp"

#include "sgm/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace sgm {

namespace {

struct ExponentialCoefficients {
    double growth;      // e^h
    double score_gain;  // 2 (e^h - 1)
    double noise_scale; // sqrt(e^{2h} - 1)
};

ExponentialCoefficients exponential_coefficients(double h)
{
    return {std::exp(h), 2.0 * std::expm1(h), std::sqrt(std::expm1(2.0 * h))};
}

void require_finite(std::span<const double> v, const char* what)
{
    for (double x : v) {
        if (!std::isfinite(x)) throw NumericError(std::string("non-finite ") + what);
    }
}

void check_dims(std::span<const double> x, std::span<const double> g, std::size_t dim)
{
    if (x.size() != dim || g.size() != dim) {
        throw std::invalid_argument("stepper: dimension mismatch");
    }
}

} // namespace

std::string to_string(Scheme scheme)
{
    switch (scheme) {
    case Scheme::forward: return "forward";
    case Scheme::em: return "em";
    case Scheme::ddpm: return "ddpm";
    }
    return "unknown";
}

Scheme parse_scheme(const std::string& name)
{
    if (name == "forward") return Scheme::forward;
    if (name == "em") return Scheme::em;
    if (name == "ddpm") return Scheme::ddpm;
    throw std::invalid_argument("unknown stepper '" + name + "'");
}

std::vector<double> forward_ou_step(std::span<const double> x, const TimeGrid& grid, std::span<const double> g)
{
    check_dims(x, g, x.size());
    require_finite(x, "state");
    require_finite(g, "noise");
    const double h = grid.step_size();
    const double noise = std::sqrt(2.0 * h);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double drift = -x[i];
        out[i] = x[i] + h * drift + noise * g[i];
    }
    return out;
}

std::vector<double> em_reverse_step(std::span<const double> x, std::size_t k, const ScoreModel& score,
                                    const TimeGrid& grid, std::span<const double> g)
{
    check_dims(x, g, score.dim());
    require_finite(g, "noise");
    const double h = grid.step_size();
    const double noise = std::sqrt(2.0 * h);
    std::vector<double> out = score(grid.reverse_time(k), x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double drift = x[i] + 2.0 * out[i];
        out[i] = x[i] + h * drift + noise * g[i];
    }
    return out;
}

std::vector<double> ddpm_reverse_step(std::span<const double> x, std::size_t k, const ScoreModel& score,
                                      const TimeGrid& grid, std::span<const double> g)
{
    check_dims(x, g, score.dim());
    require_finite(g, "noise");
    const auto c = exponential_coefficients(grid.step_size());
    std::vector<double> out = score(grid.reverse_time(k), x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = c.growth * x[i] + c.score_gain * out[i] + c.noise_scale * g[i];
    }
    return out;
}

void advance(Scheme scheme, const DriftField& drift, const TimeGrid& grid, std::size_t k,
             std::span<const double> x, std::span<const double> g, std::span<double> scratch,
             std::span<double> out)
{
    const double h = grid.step_size();
    if (scheme == Scheme::ddpm) {
        const ScoreModel* score = drift.score();
        if (score == nullptr) {
            throw std::invalid_argument("ddpm stepper needs a score-backed reverse drift");
        }
        score->evaluate(grid.reverse_time(k), x, scratch);
        const auto c = exponential_coefficients(h);
        for (std::size_t i = 0; i < x.size(); ++i) {
            out[i] = c.growth * x[i] + c.score_gain * scratch[i] + c.noise_scale * g[i];
        }
    } else {
        drift.evaluate(k, x, scratch);
        const double noise = std::sqrt(2.0 * h);
        for (std::size_t i = 0; i < x.size(); ++i) {
            out[i] = x[i] + h * scratch[i] + noise * g[i];
        }
    }
    require_finite(out, "state");
}

GaussianSpec propagate_gaussian(const GaussianSpec& init, const ScoreModel& score, const TimeGrid& grid,
                                Scheme scheme)
{
    if (init.dim() != score.dim()) {
        throw std::invalid_argument("propagate_gaussian: dimension mismatch");
    }
    const double h = grid.step_size();
    const auto c = exponential_coefficients(h);
    std::vector<double> mean = init.mean();
    std::vector<double> var = init.var();
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        std::vector<double> slope(init.dim(), -1.0);
        std::vector<double> intercept(init.dim(), 0.0);
        if (scheme != Scheme::forward) {
            auto affine = score.affine_at(grid.reverse_time(k));
            if (!affine) {
                throw std::invalid_argument("propagate_gaussian: score is not affine in x");
            }
            slope = std::move(affine->slope);
            intercept = std::move(affine->intercept);
        }
        for (std::size_t i = 0; i < init.dim(); ++i) {
            double gain = 0.0;
            double shift = 0.0;
            double noise_var = 0.0;
            switch (scheme) {
            case Scheme::forward:
                gain = 1.0 - h;
                noise_var = 2.0 * h;
                break;
            case Scheme::em:
                gain = 1.0 + h + 2.0 * h * slope[i];
                shift = 2.0 * h * intercept[i];
                noise_var = 2.0 * h;
                break;
            case Scheme::ddpm:
                gain = c.growth + c.score_gain * slope[i];
                shift = c.score_gain * intercept[i];
                noise_var = c.noise_scale * c.noise_scale;
                break;
            }
            mean[i] = gain * mean[i] + shift;
            var[i] = gain * gain * var[i] + noise_var;
        }
    }
    return GaussianSpec(std::move(mean), std::move(var));
}

} // namespace sgm
