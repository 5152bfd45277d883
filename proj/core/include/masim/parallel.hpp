#pragma once

#include <cstddef>
#include <functional>

namespace masim {

// Number of worker threads used for embarrassingly parallel loops.
// Reads MASIM_THREADS on every call; falls back to hardware concurrency.
unsigned worker_count();

// Calls fn(i) for every i in [0, count). Indices are split into contiguous
// blocks, one per worker. fn must only write to per-index storage; callers do
// any reduction serially afterwards so results never depend on the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace masim
