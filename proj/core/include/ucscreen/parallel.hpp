#pragma once

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ucs {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Callers write
// results into pre-sized slots indexed by i, so aggregation order never
// depends on scheduling. workers <= 1 degenerates to a plain loop.
inline void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (workers <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int nthreads = std::min(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  std::mutex err_mutex;
  std::exception_ptr first_error;
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t]() {
      for (int i = t; i < n; i += nthreads) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ucs
