#pragma once

#include "sgm/drift.hpp"
#include "sgm/score.hpp"
#include "sgm/time_grid.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sgm {

/// Discretization used to advance a path.
///  - forward: x + h b_k(x) + sqrt(2h) g  (Euler-Maruyama for the forward process)
///  - em:      same update with a reverse drift x + 2 s(T - kh, x)
///  - ddpm:    e^h x + 2 (e^h - 1) s(T - kh, x) + sqrt(e^{2h} - 1) g  (exponential integrator)
enum class Scheme { forward, em, ddpm };

std::string to_string(Scheme scheme);
/// Throws std::invalid_argument for unknown names.
Scheme parse_scheme(const std::string& name);

/// x + h (-x) + sqrt(2h) g. Throws NumericError on non-finite input.
std::vector<double> forward_ou_step(std::span<const double> x, const TimeGrid& grid, std::span<const double> g);

/// x + h (x + 2 score(T - kh, x)) + sqrt(2h) g.
std::vector<double> em_reverse_step(std::span<const double> x, std::size_t k, const ScoreModel& score,
                                    const TimeGrid& grid, std::span<const double> g);

/// e^h x + 2 (e^h - 1) score(T - kh, x) + sqrt(e^{2h} - 1) g.
std::vector<double> ddpm_reverse_step(std::span<const double> x, std::size_t k, const ScoreModel& score,
                                      const TimeGrid& grid, std::span<const double> g);

/// Applies one step of `scheme` in place of out. forward/em use drift.evaluate; ddpm requires
/// drift.score() and throws std::invalid_argument without it. `scratch` must hold dim values.
void advance(Scheme scheme, const DriftField& drift, const TimeGrid& grid, std::size_t k,
             std::span<const double> x, std::span<const double> g, std::span<double> scratch,
             std::span<double> out);

/// Law of the sampler output when started from a diagonal Gaussian and driven by a score that is
/// affine in x (Gaussian data). Mean and variance follow the exact linear recursion of the
/// scheme, so no sampling noise enters. Throws std::invalid_argument for non-affine scores.
GaussianSpec propagate_gaussian(const GaussianSpec& init, const ScoreModel& score, const TimeGrid& grid,
                                Scheme scheme);

} // namespace sgm
