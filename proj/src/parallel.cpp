#include "nspmine/parallel.hpp"

namespace nsp {

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_thread_count(unsigned n) { g_threads.store(n); }

unsigned thread_count() {
  const unsigned n = g_threads.load();
  if (n != 0) return n;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace detail {
bool& inside_parallel_region() {
  thread_local bool inside = false;
  return inside;
}
}  // namespace detail

}  // namespace nsp
