#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace evenscat {

/// Worker count from EVENSCAT_THREADS, else the hardware concurrency.
inline unsigned default_threads() {
  if (const char* env = std::getenv("EVENSCAT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Split [begin, end) into `threads` contiguous blocks and run body(lo, hi, worker)
/// on each. The first exception thrown by a worker is rethrown on the caller.
template <class Body>
void parallel_blocks(std::uint64_t begin, std::uint64_t end, unsigned threads, Body&& body) {
  if (end <= begin) return;
  const std::uint64_t n = end - begin;
  threads = static_cast<unsigned>(std::clamp<std::uint64_t>(threads, 1, n));
  if (threads == 1) {
    body(begin, end, 0u);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex mu;
  for (unsigned w = 0; w < threads; ++w) {
    const std::uint64_t lo = begin + n * w / threads;
    const std::uint64_t hi = begin + n * (w + 1) / threads;
    pool.emplace_back([&, lo, hi, w] {
      try {
        body(lo, hi, w);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace evenscat
