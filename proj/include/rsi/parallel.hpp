#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rsi {

// 0 means "one worker per hardware thread".
inline unsigned resolve_worker_count(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits [0, count) into chunks of `grain` handed out dynamically to `workers`
/// threads. `fn(worker, begin, end)` runs on the calling thread when one worker
/// suffices. The first exception thrown by any worker is rethrown after join.
template <typename Fn>
void parallel_chunks(std::size_t count, unsigned workers, std::size_t grain, Fn&& fn) {
  if (count == 0) return;
  grain = std::max<std::size_t>(grain, 1);
  const std::size_t chunks = (count + grain - 1) / grain;
  workers = static_cast<unsigned>(std::min<std::size_t>(std::max(workers, 1u), chunks));

  if (workers == 1) {
    for (std::size_t begin = 0; begin < count; begin += grain) {
      fn(0u, begin, std::min(count, begin + grain));
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&](unsigned worker) {
    try {
      for (;;) {
        const std::size_t chunk = next.fetch_add(1, std::memory_order_relaxed);
        if (chunk >= chunks) break;
        const std::size_t begin = chunk * grain;
        fn(worker, begin, std::min(count, begin + grain));
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(chunks, std::memory_order_relaxed);
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) threads.emplace_back(body, w);
  body(0);
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace rsi
