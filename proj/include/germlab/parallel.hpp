#pragma once

#include <cstddef>
#include <functional>

namespace germlab {

/// Worker count: GERMLAB_WORKERS if set and positive, else the hardware
/// concurrency (at least 1).
int worker_count();
/// Overrides the environment for the current process; 0 restores it.
void set_worker_count(int n);

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index
/// runs exactly once; callers write results into per-index slots so the
/// outcome does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace germlab
