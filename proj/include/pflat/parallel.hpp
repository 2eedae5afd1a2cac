#pragma once

#include <functional>

namespace pflat {

/// Worker count for per-simplex assembly, read from the PFLAT_THREADS
/// environment variable (default 1).
int thread_count();

/// Runs fn(0..n-1) over contiguous chunks on thread_count() threads. If any
/// call throws, the exception raised at the lowest index is rethrown, so
/// failures are reported the same way regardless of the thread count.
void parallel_for(int n, const std::function<void(int)>& fn);

} // namespace pflat
