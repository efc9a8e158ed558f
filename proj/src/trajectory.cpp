#include "sgm/trajectory.hpp"

#include <stdexcept>

namespace sgm {

Trajectory::Trajectory(TimeGrid grid, std::size_t dim)
    : grid_(grid), dim_(dim), states_((grid.steps() + 1) * dim, 0.0), noises_(grid.steps() * dim, 0.0)
{
    if (dim == 0) {
        throw std::invalid_argument("Trajectory: dimension must be >= 1");
    }
}

Trajectory::Trajectory(TimeGrid grid, std::size_t dim, std::vector<double> states, std::vector<double> noises)
    : grid_(grid), dim_(dim), states_(std::move(states)), noises_(std::move(noises))
{
    if (dim == 0 || states_.size() != (grid.steps() + 1) * dim || noises_.size() != grid.steps() * dim) {
        throw std::invalid_argument("Trajectory: storage does not match (N+1) x d states and N x d noises");
    }
}

} // namespace sgm
