#pragma once

#include <functional>

namespace dunif {

// Worker count: hardware concurrency, capped by the DU_THREADS environment
// variable when it holds a positive integer.
int worker_count();

// Runs body(i) for i in [0, n). Work is split into contiguous blocks, so the
// result is deterministic as long as body(i) only writes slot i. The first
// exception thrown by any worker is rethrown.
void parallel_for(int n, const std::function<void(int)>& body);

} // namespace dunif
