#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "addigit/additive.hpp"
#include "addigit/errors.hpp"
#include "addigit/parallel.hpp"
#include "addigit/primes.hpp"

namespace addigit {

struct run_options {
  uint64_t segment_len = 1ull << 22;
  int threads = 0;                          // 0 = machine parallelism
  uint64_t memory_budget = 2ull << 30;      // bytes, per materialized result
};

// Dense f(n) values over the half-open range [lo, hi).
template <typename T>
struct factored_range {
  uint64_t lo = 1, hi = 1;
  std::vector<T> values;  // values[n - lo] = f(n)
};

namespace detail {

template <typename T>
T spec_value(const additive_spec& spec, uint64_t p, unsigned k);

template <>
inline uint64_t spec_value<uint64_t>(const additive_spec& spec, uint64_t p, unsigned k) {
  return spec.value_u64(p, k);
}
template <>
inline double spec_value<double>(const additive_spec& spec, uint64_t p, unsigned k) {
  return spec.value(p, k);
}

// One segment of the factoring sieve.  For each base prime p we sweep the
// multiples of p, p^2, ... and add the telescoped increment
// f(p^e) - f(p^{e-1}); an element hit by passes e = 1..k accumulates exactly
// f(p^k).  `divisor` tracks the product of detected prime powers so the
// leftover cofactor (necessarily a single prime > sqrt(hi)) falls out with
// one division per element.
template <typename T>
void sieve_segment(const additive_spec& spec, uint64_t lo, uint64_t hi,
                   std::span<const uint32_t> base_primes,
                   std::vector<T>& values, std::vector<uint64_t>& divisor) {
  const uint64_t len = hi - lo;
  values.assign(len, T{});
  divisor.assign(len, 1);
  for (uint32_t p32 : base_primes) {
    const uint64_t p = p32;
    if (p * p >= hi) break;
    uint64_t pe = p;  // p^e
    for (unsigned e = 1; pe < hi; ++e) {
      T delta = spec_value<T>(spec, p, e);
      if (e > 1) delta -= spec_value<T>(spec, p, e - 1);
      uint64_t first = (lo + pe - 1) / pe * pe;
      if (first >= hi) break;
      for (uint64_t m = first; m < hi; m += pe) {
        size_t i = static_cast<size_t>(m - lo);
        values[i] += delta;
        divisor[i] *= p;
      }
      if (pe > (hi - 1) / p) break;  // p^(e+1) would overflow past the range
      pe *= p;
    }
  }
  for (size_t i = 0; i < len; ++i) {
    uint64_t n = lo + i;
    if (divisor[i] != n) {
      uint64_t q = n / divisor[i];
      if (q > 1) values[i] += spec_value<T>(spec, q, 1);
    }
  }
}

inline void check_range(uint64_t lo, uint64_t hi) {
  if (lo < 1 || hi <= lo) throw config_error("sieve range requires 1 <= lo < hi");
  if (isqrt_u64(hi - 1) > (1ull << 31))
    throw resource_error("sieve range upper bound too large for base prime table");
}

}  // namespace detail

// Base primes needed to fully factor every n < hi.
inline std::vector<uint32_t> base_primes_for(uint64_t hi) {
  return simple_sieve(isqrt_u64(hi > 1 ? hi - 1 : 1));
}

// Bulk-evaluates f over [lo, hi).  Segments are independent, so the result is
// identical for any segment length or thread count.
template <typename T>
factored_range<T> sieve_range(const additive_spec& spec, uint64_t lo, uint64_t hi,
                              const run_options& opts = {}) {
  detail::check_range(lo, hi);
  const uint64_t len = hi - lo;
  if (len * (sizeof(T) + sizeof(uint64_t)) > opts.memory_budget)
    throw resource_error("sieve_range: segment exceeds memory budget");
  factored_range<T> out;
  out.lo = lo;
  out.hi = hi;
  out.values.resize(len);
  auto base = base_primes_for(hi);
  run_segments(lo, hi, opts.segment_len, opts.threads,
               [&](size_t, uint64_t seg_lo, uint64_t seg_hi) {
                 std::vector<T> vals;
                 std::vector<uint64_t> divisor;
                 detail::sieve_segment(spec, seg_lo, seg_hi, base, vals, divisor);
                 std::copy(vals.begin(), vals.end(),
                           out.values.begin() + static_cast<size_t>(seg_lo - lo));
               });
  return out;
}

// Streams sieved segments to fn(seg_index, seg_lo, values) without holding the
// whole range.  fn may run concurrently across distinct indices.
template <typename T, typename Fn>
void for_each_factored_segment(const additive_spec& spec, uint64_t lo, uint64_t hi,
                               const run_options& opts, Fn&& fn) {
  detail::check_range(lo, hi);
  if (opts.segment_len * (sizeof(T) + sizeof(uint64_t)) > opts.memory_budget)
    throw resource_error("segment length exceeds memory budget");
  auto base = base_primes_for(hi);
  run_segments(lo, hi, opts.segment_len, opts.threads,
               [&](size_t idx, uint64_t seg_lo, uint64_t seg_hi) {
                 thread_local std::vector<T> vals;
                 thread_local std::vector<uint64_t> divisor;
                 detail::sieve_segment(spec, seg_lo, seg_hi, base, vals, divisor);
                 fn(idx, seg_lo, std::span<const T>(vals.data(), vals.size()));
               });
}

// Prime sums sum_{p < x} f(p)/p and f(p)^2/p, accumulated ascending in p.
struct prime_moments_result {
  uint64_t x = 0;
  double mean_sum = 0.0;      // A
  double variance_sum = 0.0;  // B
};

inline prime_moments_result prime_moments(const additive_spec& spec, uint64_t x) {
  if (x < 2) throw config_error("prime_moments requires x >= 2");
  prime_moments_result r;
  r.x = x;
  for_each_prime(2, x, [&](uint64_t p) {
    double fp = spec.prime_value(p);
    r.mean_sum += fp / static_cast<double>(p);
    r.variance_sum += fp * fp / static_cast<double>(p);
  });
  return r;
}

}  // namespace addigit
