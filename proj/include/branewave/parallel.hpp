// Static fan-out over independent work items.
#pragma once

#include <cstddef>
#include <functional>

namespace branewave {

// Worker count: hardware concurrency, capped by BRANEWAVE_THREADS when that
// variable holds a positive integer. Always >= 1.
unsigned thread_count();

// Calls body(i) for i in [0, n). Items are split into contiguous blocks, one
// per worker, so results written to slot i do not depend on scheduling. The
// first exception thrown by any worker is rethrown after all have joined.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace branewave
