#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace persist {

inline constexpr std::int64_t kBatchSize = 10'000;

/// Worker count: PERSIST_WORKERS when set to a positive integer, otherwise
/// the hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("PERSIST_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min<long>(v, 1024));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/*!
 * Calls body(batch, begin, end) for every batch of [0, n) in fixed-size
 * chunks, spread over the workers. Batches are claimed dynamically; results
 * must be stored by batch index so the merge order does not depend on
 * scheduling. The first exception thrown by a body is rethrown.
 */
template <typename Body>
void for_each_batch(std::int64_t n, Body&& body, std::int64_t batch_size = kBatchSize, int workers = worker_count()) {
  if (n <= 0) return;
  const std::int64_t n_batches = (n + batch_size - 1) / batch_size;
  workers = static_cast<int>(std::min<std::int64_t>(workers, n_batches));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const std::int64_t b = next.fetch_add(1);
      if (b >= n_batches) return;
      try {
        body(b, b * batch_size, std::min(n, (b + 1) * batch_size));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n_batches);
      }
    }
  };
  if (workers <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

inline std::int64_t batch_count(std::int64_t n, std::int64_t batch_size = kBatchSize) {
  return n <= 0 ? 0 : (n + batch_size - 1) / batch_size;
}

}  // namespace persist
