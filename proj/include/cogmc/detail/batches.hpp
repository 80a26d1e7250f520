#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace cogmc::detail {

/// Engine for batch `batch` of a run seeded with `seed`. `stream` separates
/// unrelated consumers of the same master seed.
inline std::mt19937_64 batch_engine(std::uint64_t seed, std::uint64_t batch, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(batch), static_cast<std::uint32_t>(batch >> 32),
                    stream};
  return std::mt19937_64(seq);
}

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(b) for b in [0, n_batches) on up to `threads` workers and
/// returns the per-batch results in batch order.
template <typename Result, typename Fn>
std::vector<Result> run_batches(std::uint64_t n_batches, unsigned threads, Fn fn) {
  std::vector<Result> results(n_batches);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), n_batches));
  if (workers <= 1) {
    for (std::uint64_t b = 0; b < n_batches; ++b) results[b] = fn(b);
    return results;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t b = next++; b < n_batches; b = next++) {
        try {
          results[b] = fn(b);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace cogmc::detail
