#pragma once

#include "peer/types.hpp"

#include <functional>
#include <optional>

namespace peer {

/// Run body(0..num_tasks-1) on up to num_workers threads. Tasks are pulled
/// dynamically; the body must only write to task-indexed slots so results
/// are identical for any worker count. The first exception thrown by a task
/// is rethrown on the calling thread after all workers join.
void parallel_for(Index num_workers, Index num_tasks,
                  const std::function<void(Index)>& body);

/// Resolve a requested worker count: nullopt means auto (hardware
/// concurrency, at least 1); explicit values must be >= 1.
Index resolve_thread_count(std::optional<Index> requested);

}  // namespace peer
