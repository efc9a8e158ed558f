#pragma once

#include "sgm/time_grid.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sgm {

/// One discrete path x_0 .. x_{Nh} and the standard-normal draws g_0 .. g_{N-1} that produced it.
class Trajectory {
public:
    Trajectory(TimeGrid grid, std::size_t dim);
    /// Adopts existing storage; throws std::invalid_argument if the sizes are not (N+1)*d and N*d.
    Trajectory(TimeGrid grid, std::size_t dim, std::vector<double> states, std::vector<double> noises);

    const TimeGrid& grid() const noexcept { return grid_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t steps() const noexcept { return grid_.steps(); }

    std::span<const double> state(std::size_t k) const noexcept { return {states_.data() + k * dim_, dim_}; }
    std::span<double> state(std::size_t k) noexcept { return {states_.data() + k * dim_, dim_}; }
    std::span<const double> noise(std::size_t k) const noexcept { return {noises_.data() + k * dim_, dim_}; }
    std::span<double> noise(std::size_t k) noexcept { return {noises_.data() + k * dim_, dim_}; }

    std::span<const double> terminal() const noexcept { return state(grid_.steps()); }

    const std::vector<double>& states() const noexcept { return states_; }
    const std::vector<double>& noises() const noexcept { return noises_; }

    friend bool operator==(const Trajectory&, const Trajectory&) = default;

private:
    TimeGrid grid_;
    std::size_t dim_;
    std::vector<double> states_;
    std::vector<double> noises_;
};

/// Trajectories sharing one grid; path i is a pure function of (master_seed, stream, i).
struct PathBatch {
    TimeGrid grid;
    std::size_t dim = 0;
    std::uint64_t master_seed = 0;
    std::vector<Trajectory> paths;

    std::size_t size() const noexcept { return paths.size(); }
    bool empty() const noexcept { return paths.empty(); }

    friend bool operator==(const PathBatch&, const PathBatch&) = default;
};

} // namespace sgm
