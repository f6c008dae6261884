#ifndef SUBDIFF_PARALLEL_HPP
#define SUBDIFF_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace subdiff {

/// Runs body(i) for i in [0, n) on up to `budget` threads.  Tasks are handed
/// out through an atomic counter; callers must make task i's output depend
/// only on i (write to slot i, derive RNG streams by index) so the result is
/// identical under any schedule.  budget <= 1 runs inline.
inline void parallel_for(std::size_t n, int budget,
                         const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  std::size_t workers = budget <= 0 ? hw : static_cast<std::size_t>(budget);
  if (workers > n) workers = n;
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load(std::memory_order_relaxed)) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace subdiff

#endif  // SUBDIFF_PARALLEL_HPP
