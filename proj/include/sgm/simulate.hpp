#pragma once

#include "sgm/drift.hpp"
#include "sgm/gaussian.hpp"
#include "sgm/steppers.hpp"
#include "sgm/time_grid.hpp"
#include "sgm/trajectory.hpp"

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

namespace sgm {

/// Explicit initial states, row-major n_rows x dim. Path i starts at row i mod n_rows.
struct SampleSet {
    std::size_t dim = 0;
    std::vector<double> values;

    std::size_t rows() const noexcept { return dim == 0 ? 0 : values.size() / dim; }
};

using InitialLaw = std::variant<GaussianSpec, SampleSet>;

struct SimulationOptions {
    /// OpenMP thread count; 0 uses the runtime default.
    int threads = 0;
    /// Separates independent experiments that share a master seed.
    std::uint32_t stream = 0;
    /// Test hook: every g is forced to zero (initial Gaussian draws included).
    bool zero_noise = false;
};

/// Simulates n_paths trajectories. Path i draws its initial state from slot 0 and its step-k
/// noise from slot k + 1 of NormalStream(master_seed, options.stream) at path index i, so the
/// batch does not depend on the thread count.
/// Throws std::invalid_argument for n_paths == 0, more than 2^32 paths, a dimension mismatch
/// between init and drift, or an empty sample set; NumericError if a state becomes non-finite.
PathBatch simulate_batch(const InitialLaw& init, const DriftField& drift, const TimeGrid& grid,
                         std::size_t n_paths, std::uint64_t master_seed, Scheme scheme,
                         const SimulationOptions& options = {});

/// Same draws as simulate_batch but keeps only the terminal states (row-major n_paths x dim).
SampleSet simulate_terminal(const InitialLaw& init, const DriftField& drift, const TimeGrid& grid,
                            std::size_t n_paths, std::uint64_t master_seed, Scheme scheme,
                            const SimulationOptions& options = {});

/// The initial states simulate_batch would use for paths 0 .. n_paths - 1.
SampleSet sample_initial(const InitialLaw& init, std::size_t n_paths, std::uint64_t master_seed,
                         const SimulationOptions& options = {});

/// Re-runs `scheme` from the trajectory's first state using its stored noises.
Trajectory replay(const Trajectory& path, const DriftField& drift, Scheme scheme);

} // namespace sgm
