#include "sgm/time_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace sgm {

TimeGrid::TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps), h_(0.0)
{
    if (!(std::isfinite(horizon) && horizon > 0.0)) {
        throw std::invalid_argument("TimeGrid: horizon must be finite and > 0");
    }
    if (steps == 0) {
        throw std::invalid_argument("TimeGrid: need at least one step");
    }
    h_ = horizon / static_cast<double>(steps);
}

} // namespace sgm
