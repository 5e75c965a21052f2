#pragma once

#include <cstdlib>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ljsr {

/// Thread cap: LJSR_THREADS if set (0 means serial), hardware concurrency
/// otherwise.
inline int thread_cap() {
  if (const char* env = std::getenv("LJSR_THREADS")) {
    const int v = std::atoi(env);
    return v <= 0 ? 1 : v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Runs fn(i) for i in [0, count). Work items must write only to their own
/// output slots; the caller combines slots in index order afterwards, so
/// results do not depend on the thread count.
inline void parallel_for(int count, const std::function<void(int)>& fn) {
  const int threads = std::min(thread_cap(), count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (int i = t; i < count; i += threads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ljsr
