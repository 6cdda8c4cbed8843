#pragma once

#include <cstddef>
#include <functional>

namespace uavmc {

/// Worker count: PLANNER_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, n) over contiguous chunks. Callers write results
/// into index-addressed storage, so the outcome is independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace uavmc
