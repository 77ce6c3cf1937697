#ifndef DPPREC_PARALLEL_HPP_
#define DPPREC_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace dpprec {

// Run worker(i) for i in [0, count) on up to `threads` threads. Callers index
// their result storage by i, so aggregation order is independent of
// scheduling. The first worker exception is rethrown on the calling thread.
inline void parallel_for(long count, int threads,
                         const std::function<void(long)>& worker) {
  if (threads <= 1 || count <= 1) {
    for (long i = 0; i < count; ++i) {
      worker(i);
    }
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= count) {
        return;
      }
      try {
        worker(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) {
          first_error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  const int spawned = static_cast<int>(std::min<long>(threads, count));
  pool.reserve(spawned);
  for (int t = 0; t < spawned; ++t) {
    pool.emplace_back(run);
  }
  for (std::thread& t : pool) {
    t.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
}

}  // namespace dpprec

#endif  // DPPREC_PARALLEL_HPP_
