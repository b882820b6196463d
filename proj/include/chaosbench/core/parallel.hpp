#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace chaosbench {

/// Worker count: CHAOSBENCH_THREADS if set to a positive integer, otherwise
/// the hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("CHAOSBENCH_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Run fn(i) for i in [0, n). Work is handed out through a shared counter, so
/// idle workers pick up whatever is left. Callers write results into slot i;
/// nothing depends on which thread ran what. The exception of the smallest
/// failing index is rethrown.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned threads = 0) {
  if (threads == 0) threads = worker_count();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace chaosbench
