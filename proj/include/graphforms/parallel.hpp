#pragma once

#include <cstddef>
#include <functional>

namespace graphforms {

/// Worker count from GRAPHFORMS_WORKERS, else the hardware concurrency.
int worker_count();

/// Calls body(k) for k in [0, count) on up to worker_count() threads. Each
/// index runs exactly once; callers write into per-index slots and reduce in
/// index order so results do not depend on scheduling. The first exception
/// thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace graphforms
