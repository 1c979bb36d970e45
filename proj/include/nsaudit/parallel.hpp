#pragma once

#include <cstddef>
#include <functional>

namespace nsaudit {

// Worker count: NS_AUDIT_THREADS if set (>= 1), else hardware concurrency.
int worker_count();

// Runs body(i) for i in [0, count) on up to worker_count() threads. Work is
// split into contiguous static chunks, so any per-index output is
// independent of scheduling. Callers that reduce must write per-index
// partials and fold them in index order afterwards.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace nsaudit
