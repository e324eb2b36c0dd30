#pragma once

#include <cstddef>
#include <functional>

namespace canonscreen {

/// Worker count: CANONSCREEN_THREADS if set and positive, otherwise the
/// hardware concurrency (at least 1).
std::size_t max_threads();

/// Runs body(i) for i in [0, count) on up to max_threads() workers. The first
/// exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace canonscreen
