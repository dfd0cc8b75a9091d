#pragma once

#include <cstddef>
#include <functional>

namespace sdm {

/// Worker count for batch-parallel maps. Defaults to SDM_THREADS or 1.
std::size_t thread_count();
void set_thread_count(std::size_t n);
/// SDM_THREADS when it holds a positive integer, else 1.
std::size_t default_thread_count();

/// Runs fn(i) for i in [0, n) over a static partition. Each index is
/// processed exactly once, so per-index results never depend on the pool
/// size. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace sdm
