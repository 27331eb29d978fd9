#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nsp {

// Worker cap for parallel_for. 0 means std::thread::hardware_concurrency().
void set_thread_count(unsigned n);
unsigned thread_count();

namespace detail {
bool& inside_parallel_region();
}

// Calls body(i) for every i in [0, n). Each index runs exactly once; callers
// write results into index-addressed slots so the outcome never depends on
// scheduling. Nested calls run serially on the calling worker.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const unsigned workers = thread_count();
  if (n == 0) return;
  if (workers <= 1 || n == 1 || detail::inside_parallel_region()) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    detail::inside_parallel_region() = true;
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
      }
    }
    detail::inside_parallel_region() = false;
  };
  const std::size_t spawn = std::min<std::size_t>(workers, n);
  std::vector<std::jthread> pool;
  pool.reserve(spawn - 1);
  for (std::size_t t = 1; t < spawn; ++t) pool.emplace_back(run);
  run();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace nsp
