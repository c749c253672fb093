#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace extflow {

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads.
/// Each index is visited exactly once; the first exception thrown by any
/// task is rethrown on the calling thread after all workers have joined.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first;
  std::mutex mtx;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mtx);
          if (!first) first = std::current_exception();
          return;
        }
      }
    });
  }
  pool.clear();
  if (first) std::rethrow_exception(first);
}

}  // namespace extflow
