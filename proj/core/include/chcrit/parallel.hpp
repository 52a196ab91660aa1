#pragma once

#include <functional>

namespace chcrit {

// Worker cap for parallel maps. Default is the hardware concurrency.
int worker_count();
void set_worker_count(int k);

// Runs fn(0..n-1) across the configured workers. Results must land in
// preallocated per-index slots; no reduction is performed here, so output is
// independent of the worker count. The lowest-index exception is rethrown.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace chcrit
