#pragma once

#include <cstddef>
#include <functional>

namespace ajk {

/// Worker count from the AJK_WORKERS environment variable (default 1).
int default_worker_count();

/// Runs body(i) for i in [0, count) on up to `workers` threads. Each index
/// runs exactly once; callers write results into per-index slots so the
/// outcome does not depend on scheduling. If bodies throw, the exception of
/// the lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace ajk
