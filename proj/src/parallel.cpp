#include "sgm/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace sgm {

double pairwise_sum(std::span<const double> values) noexcept
{
    constexpr std::size_t kLeaf = 16;
    if (values.size() <= kLeaf) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MeanEstimate mean_with_stderr(std::span<const double> values)
{
    if (values.empty()) {
        throw std::invalid_argument("mean_with_stderr: no values");
    }
    const auto n = static_cast<double>(values.size());
    const double mean = pairwise_sum(values) / n;
    if (values.size() == 1) {
        return {mean, 0.0, 1};
    }
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double dev = values[i] - mean;
        sq[i] = dev * dev;
    }
    const double variance = pairwise_sum(sq) / (n - 1.0);
    return {mean, std::sqrt(variance / n), values.size()};
}

} // namespace sgm
