#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace longwrite {

// Runs fn(0..n-1) on up to `workers` threads. fn must handle its own errors;
// anything escaping would terminate, so callers wrap bodies in try/catch and
// record failures per item.
inline void parallel_for(size_t n, int workers,
                         const std::function<void(size_t)>& fn) {
  if (n == 0) return;
  const size_t pool = std::min<size_t>(n, workers < 1 ? 1 : workers);
  if (pool == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(pool);
  for (size_t t = 0; t < pool; ++t) {
    threads.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& thread : threads) thread.join();
}

}  // namespace longwrite
