#pragma once

#include <cstddef>
#include <functional>

namespace laac {

/// Calls fn(i) for i in [0, n) on up to `jobs` threads. The first exception
/// thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)> &fn);

} // namespace laac
