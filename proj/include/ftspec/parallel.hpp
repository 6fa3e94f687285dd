#pragma once

#include <cstddef>
#include <functional>

namespace ftspec {

/// Worker count from FTSPEC_THREADS, falling back to hardware_concurrency.
[[nodiscard]] std::size_t default_parallelism();

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = default).
/// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace ftspec
