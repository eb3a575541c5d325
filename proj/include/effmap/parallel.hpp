#pragma once

#include <cstddef>
#include <functional>

namespace effmap::parallel {

/// Worker count: EFFMAP_THREADS when set (0 means hardware concurrency),
/// otherwise hardware concurrency. Always at least 1.
std::size_t thread_count();

/// Overrides the worker count for this process; 0 restores the default.
void set_thread_count(std::size_t n);

/// Runs body(i) for i in [0, n_tasks). Tasks are independent; results must
/// be written to per-task slots so the outcome is independent of scheduling.
void for_each_task(std::size_t n_tasks, const std::function<void(std::size_t)>& body);

}  // namespace effmap::parallel
