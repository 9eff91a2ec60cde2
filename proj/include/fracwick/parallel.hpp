#pragma once

#include <cstddef>
#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fracwick {

/// Worker cap: FRACWICK_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
std::size_t worker_count();

// Runs body(i) for i in [0, n) over contiguous blocks. Each index is
// touched by exactly one worker, so writing results into slot i and
// reducing afterwards in index order is deterministic for any worker count.
// The first exception thrown by a worker is rethrown on the caller.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

template <class Fn>
auto parallel_map(std::size_t n, Fn&& fn) {
  using T = decltype(fn(std::size_t{0}));
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace fracwick
