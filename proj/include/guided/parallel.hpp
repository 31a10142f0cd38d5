#pragma once

#include <cstddef>
#include <functional>

namespace guided {

/// Worker count: hardware concurrency, capped by the GB_THREADS environment variable.
unsigned worker_count();

/// Runs body(i) for i in [0, n). Each index is visited exactly once; callers write results by index.
/// The first exception thrown by any body is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace guided
