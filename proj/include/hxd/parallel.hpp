#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hxd {

/// Worker count for parallel loops; 0 selects hardware concurrency.
void set_thread_count(unsigned count);
unsigned thread_count();

namespace detail {
/// Set inside worker threads; nested loops then run serially.
inline thread_local bool in_parallel_region = false;
}  // namespace detail

/// Runs fn(i) for i in [0, n) on contiguous chunks. Each index must write
/// only its own output slot, which keeps results independent of scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers =
      detail::in_parallel_region ? 1u : static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      detail::in_parallel_region = true;
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace hxd
