#pragma once

#include <cstddef>
#include <functional>

namespace gkforge {

// Worker count: GKFORGE_THREADS if set to a positive integer, else hardware concurrency.
unsigned thread_count();

// Runs body(i) for i in [0, n) on up to thread_count() threads; rethrows the first exception.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gkforge
