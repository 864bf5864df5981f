#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace macroq {

// Runs body(i) for every i in [0, n) on up to hardware_concurrency threads.
// Each index must write only its own output slot. The first exception is
// rethrown on the calling thread.
template <typename Body>
void parallel_for(int n, Body&& body) {
  if (n <= 0) return;
  const int workers = std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        try {
          for (int i = next++; i < n; i = next++) body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace macroq
