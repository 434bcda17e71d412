#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace nhspec {

/// Runs task(0) .. task(count-1) on up to `workers` threads. Tasks must be
/// independent and write only to their own output slot, which keeps results
/// identical for any worker count. If tasks throw, the exception from the
/// smallest index is rethrown after all workers join.
inline void run_indexed(std::size_t count, int workers,
                        const std::function<void(std::size_t)>& task) {
  const std::size_t pool =
      std::min<std::size_t>(std::max(workers, 1), count);
  if (pool <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = count;
  std::exception_ptr error;

  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(pool);
  for (std::size_t t = 0; t < pool; ++t) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace nhspec
