#include "sgm/simulate.hpp"

#include "sgm/errors.hpp"
#include "sgm/parallel.hpp"
#include "sgm/philox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgm {

namespace {

std::size_t init_dim(const InitialLaw& init)
{
    if (const auto* g = std::get_if<GaussianSpec>(&init)) return g->dim();
    return std::get<SampleSet>(init).dim;
}

void validate(const InitialLaw& init, const DriftField& drift, std::size_t n_paths, Scheme scheme)
{
    if (n_paths == 0) {
        throw std::invalid_argument("simulate_batch: n_paths must be >= 1");
    }
    if (n_paths > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument("simulate_batch: path index must fit in 32 bits");
    }
    if (init_dim(init) != drift.dim()) {
        throw std::invalid_argument("simulate_batch: init dimension does not match drift dimension");
    }
    if (const auto* samples = std::get_if<SampleSet>(&init)) {
        if (samples->rows() == 0 || samples->values.size() % samples->dim != 0) {
            throw std::invalid_argument("simulate_batch: explicit init samples are empty or ragged");
        }
    }
    if (scheme == Scheme::ddpm && drift.score() == nullptr) {
        throw std::invalid_argument("simulate_batch: ddpm stepper needs a score-backed reverse drift");
    }
}

void initial_state(const InitialLaw& init, const NormalStream& rng, std::uint32_t path, bool zero_noise,
                   std::span<double> out)
{
    if (const auto* gauss = std::get_if<GaussianSpec>(&init)) {
        if (zero_noise) {
            std::fill(out.begin(), out.end(), 0.0);
        } else {
            rng.fill(path, 0, out);
        }
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = gauss->mean()[i] + std::sqrt(gauss->var()[i]) * out[i];
        }
        return;
    }
    const auto& samples = std::get<SampleSet>(init);
    const std::size_t row = path % samples.rows();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = samples.values[row * samples.dim + i];
    }
    for (double v : out) {
        if (!std::isfinite(v)) throw NumericError("simulate_batch: non-finite initial sample");
    }
}

// Runs one path; keeps every state and noise when traj is non-null, otherwise just the endpoint.
void run_path(const InitialLaw& init, const DriftField& drift, const TimeGrid& grid, Scheme scheme,
              const NormalStream& rng, std::uint32_t path, bool zero_noise, Trajectory* traj,
              std::span<double> terminal)
{
    const std::size_t d = drift.dim();
    std::vector<double> current(d);
    std::vector<double> next(d);
    std::vector<double> noise(d, 0.0);
    std::vector<double> scratch(d);
    initial_state(init, rng, path, zero_noise, current);
    if (traj != nullptr) std::copy(current.begin(), current.end(), traj->state(0).begin());
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        if (!zero_noise) rng.fill(path, static_cast<std::uint32_t>(k + 1), noise);
        advance(scheme, drift, grid, k, current, noise, scratch, next);
        if (traj != nullptr) {
            std::copy(noise.begin(), noise.end(), traj->noise(k).begin());
            std::copy(next.begin(), next.end(), traj->state(k + 1).begin());
        }
        current.swap(next);
    }
    std::copy(current.begin(), current.end(), terminal.begin());
}

} // namespace

PathBatch simulate_batch(const InitialLaw& init, const DriftField& drift, const TimeGrid& grid,
                         std::size_t n_paths, std::uint64_t master_seed, Scheme scheme,
                         const SimulationOptions& options)
{
    validate(init, drift, n_paths, scheme);
    const NormalStream rng(master_seed, options.stream);
    PathBatch batch{grid, drift.dim(), master_seed, std::vector<Trajectory>(n_paths, Trajectory(grid, drift.dim()))};
    parallel_for(n_paths, options.threads, [&](std::size_t i) {
        Trajectory& traj = batch.paths[i];
        run_path(init, drift, grid, scheme, rng, static_cast<std::uint32_t>(i), options.zero_noise, &traj,
                 traj.state(grid.steps()));
    });
    return batch;
}

SampleSet simulate_terminal(const InitialLaw& init, const DriftField& drift, const TimeGrid& grid,
                            std::size_t n_paths, std::uint64_t master_seed, Scheme scheme,
                            const SimulationOptions& options)
{
    validate(init, drift, n_paths, scheme);
    const NormalStream rng(master_seed, options.stream);
    const std::size_t d = drift.dim();
    SampleSet out{d, std::vector<double>(n_paths * d)};
    parallel_for(n_paths, options.threads, [&](std::size_t i) {
        run_path(init, drift, grid, scheme, rng, static_cast<std::uint32_t>(i), options.zero_noise, nullptr,
                 std::span<double>(out.values.data() + i * d, d));
    });
    return out;
}

SampleSet sample_initial(const InitialLaw& init, std::size_t n_paths, std::uint64_t master_seed,
                         const SimulationOptions& options)
{
    if (n_paths == 0 || n_paths > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument("sample_initial: n_paths must be in [1, 2^32)");
    }
    const std::size_t d = init_dim(init);
    const NormalStream rng(master_seed, options.stream);
    SampleSet out{d, std::vector<double>(n_paths * d)};
    parallel_for(n_paths, options.threads, [&](std::size_t i) {
        initial_state(init, rng, static_cast<std::uint32_t>(i), options.zero_noise,
                      std::span<double>(out.values.data() + i * d, d));
    });
    return out;
}

Trajectory replay(const Trajectory& path, const DriftField& drift, Scheme scheme)
{
    if (path.dim() != drift.dim()) {
        throw std::invalid_argument("replay: dimension mismatch");
    }
    Trajectory out(path.grid(), path.dim());
    const std::size_t d = path.dim();
    std::vector<double> scratch(d);
    std::copy(path.state(0).begin(), path.state(0).end(), out.state(0).begin());
    for (std::size_t k = 0; k < path.steps(); ++k) {
        std::copy(path.noise(k).begin(), path.noise(k).end(), out.noise(k).begin());
        advance(scheme, drift, path.grid(), k, out.state(k), path.noise(k), scratch, out.state(k + 1));
    }
    return out;
}

} // namespace sgm
