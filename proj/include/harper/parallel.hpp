#pragma once

#include <cstdint>
#include <functional>
#include <span>

namespace harper {

// Worker count: HARPER_THREADS when set (clamped to >= 1), hardware concurrency otherwise.
int worker_count();

// Runs fn(i) for i in [0, n). Work items must be independent; callers that collect
// results should write into preallocated slots so the outcome is schedule-independent.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn, int threads = 0);

// Deterministic pairwise-summation reduction; independent of threading decisions.
double pairwise_sum(std::span<const double> values);

}  // namespace harper
