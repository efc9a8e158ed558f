#pragma once

#include <cstddef>
#include <exception>
#include <span>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace sgm {

/// Runs body(i) for i in [0, count). threads == 0 uses the OpenMP default, 1 runs serially.
/// Bodies must only write to per-index storage. If bodies throw, the exception from the lowest
/// failing index is rethrown once the loop finishes.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body)
{
    const auto n = static_cast<long long>(count);
    if (threads == 1 || n < 2) {
        for (long long i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
        return;
    }
    std::exception_ptr failure;
    long long failed_at = n;
    auto guarded = [&](long long i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
#if defined(_OPENMP)
#pragma omp critical(sgm_parallel_for_failure)
#endif
            if (i < failed_at) {
                failed_at = i;
                failure = std::current_exception();
            }
        }
    };
#if defined(_OPENMP)
    const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(team)
    for (long long i = 0; i < n; ++i) guarded(i);
#else
    for (long long i = 0; i < n; ++i) guarded(i);
#endif
    if (failure) std::rethrow_exception(failure);
}

/// Pairwise (cascade) summation with a fixed split order, so the result only depends on the input.
double pairwise_sum(std::span<const double> values) noexcept;

/// Sample mean and standard error of the mean (sample variance with n-1). n == 1 gives stderr 0.
struct MeanEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

/// Throws std::invalid_argument on an empty span.
MeanEstimate mean_with_stderr(std::span<const double> values);

} // namespace sgm
