#include "effmap/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace effmap::parallel {
namespace {

std::atomic<std::size_t> g_override{0};

std::size_t default_count() {
  static const std::size_t count = [] {
    std::size_t hw = std::max(1U, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("EFFMAP_THREADS")) {
      try {
        const long v = std::stol(env);
        if (v > 0) return static_cast<std::size_t>(v);
      } catch (const std::exception&) {
      }
    }
    return hw;
  }();
  return count;
}

}  // namespace

std::size_t thread_count() {
  const std::size_t o = g_override.load();
  return o > 0 ? o : default_count();
}

void set_thread_count(std::size_t n) { g_override.store(n); }

void for_each_task(std::size_t n_tasks, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(thread_count(), n_tasks);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::size_t i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace effmap::parallel
