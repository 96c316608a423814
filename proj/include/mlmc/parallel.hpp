#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace mlmc {

// Process-wide worker count used by parallel_for. 0 means "auto".
void set_thread_count(int n);
int thread_count();

// Runs fn(i) for i in [0, n). Work items must be independent; any ordered
// reduction is the caller's responsibility (collect into slots, then combine
// in index order). Exceptions from workers are rethrown on the caller thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mlmc
