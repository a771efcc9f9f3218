#pragma once

#include <cstddef>
#include <functional>

namespace manproj {

// Number of worker threads to use: MANPROJ_THREADS if set to a positive
// integer, otherwise the hardware concurrency (at least 1).
std::size_t thread_count();

// Runs fn(i) for i in [0, n).  Work is split into contiguous index ranges,
// one per thread; each index is processed exactly once, so writes into
// per-index output slots are deterministic regardless of thread count.
// Exceptions thrown by fn are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace manproj
