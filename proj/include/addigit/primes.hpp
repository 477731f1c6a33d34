#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "addigit/errors.hpp"

namespace addigit {

inline uint64_t isqrt_u64(uint64_t n) {
  if (n == 0) return 0;
  uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Primes <= limit by plain Eratosthenes.
inline std::vector<uint32_t> simple_sieve(uint64_t limit) {
  if (limit > (1ull << 31))
    throw resource_error("simple_sieve: limit too large, use segmented enumeration");
  std::vector<uint32_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (uint64_t i = 2; i * i <= limit; ++i)
    if (!composite[i])
      for (uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  for (uint64_t i = 2; i <= limit; ++i)
    if (!composite[i]) primes.push_back(static_cast<uint32_t>(i));
  return primes;
}

// Calls fn(p) for every prime p in [lo, hi), ascending.  Segmented, so memory
// stays O(sqrt(hi) + segment).
template <typename Fn>
void for_each_prime(uint64_t lo, uint64_t hi, Fn&& fn) {
  if (hi <= lo) return;
  const uint64_t seg_len = 1ull << 21;
  auto base = simple_sieve(isqrt_u64(hi - 1));
  if (lo < 2) lo = 2;
  std::vector<char> flags;
  for (uint64_t seg_lo = lo; seg_lo < hi; ) {
    uint64_t seg_hi = std::min(hi, seg_lo + seg_len);
    flags.assign(seg_hi - seg_lo, 1);
    for (uint32_t p : base) {
      uint64_t p64 = p;
      if (p64 * p64 >= seg_hi) break;
      uint64_t start = std::max(p64 * p64, (seg_lo + p64 - 1) / p64 * p64);
      for (uint64_t j = start; j < seg_hi; j += p64) flags[j - seg_lo] = 0;
    }
    for (uint64_t i = 0; i < seg_hi - seg_lo; ++i)
      if (flags[i]) fn(seg_lo + i);
    seg_lo = seg_hi;
  }
}

}  // namespace addigit
