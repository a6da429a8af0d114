#pragma once

#include <cstddef>
#include <functional>

namespace dbar {

/// Process-wide worker count for every parallel map. Defaults to the
/// DBAR_WORKERS environment variable, then to the hardware concurrency.
int worker_count();
void set_worker_count(int workers);

/// Runs body(i) for i in [0, count) over worker_count() threads. Each index
/// is visited exactly once; results must be written to disjoint locations.
/// The first exception thrown by a worker is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace dbar
