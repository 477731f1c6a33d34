#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace addigit {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

inline size_t segment_count(uint64_t lo, uint64_t hi, uint64_t seg_len) {
  if (hi <= lo) return 0;
  return static_cast<size_t>((hi - lo + seg_len - 1) / seg_len);
}

// Runs fn(seg_index, seg_lo, seg_hi) over fixed-width segments of [lo, hi).
// Segment boundaries depend only on seg_len, never on the thread count, so a
// caller that stores per-index results gets the same answer for any N.
template <typename Fn>
void run_segments(uint64_t lo, uint64_t hi, uint64_t seg_len, int threads, Fn&& fn) {
  const size_t n_segs = segment_count(lo, hi, seg_len);
  if (n_segs == 0) return;
  threads = resolve_threads(threads);
  if (threads == 1 || n_segs == 1) {
    for (size_t i = 0; i < n_segs; ++i) {
      uint64_t s = lo + i * seg_len;
      fn(i, s, std::min(hi, s + seg_len));
    }
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= n_segs || failed.load()) return;
        uint64_t s = lo + i * seg_len;
        try {
          fn(i, s, std::min(hi, s + seg_len));
        } catch (...) {
          if (!failed.exchange(true)) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace addigit
