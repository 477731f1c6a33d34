#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace addigit {

inline uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>((__uint128_t)a * b % m);
}

inline uint64_t powmod_u64(uint64_t base, uint64_t exp, uint64_t m) {
  uint64_t r = m > 1 ? 1 : 0;
  base %= m;
  while (exp) {
    if (exp & 1) r = mulmod_u64(r, base, m);
    base = mulmod_u64(base, base, m);
    exp >>= 1;
  }
  return r;
}

// Deterministic Miller-Rabin for the full 64-bit range.
inline bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) { d >>= 1; ++s; }
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) { composite = false; break; }
    }
    if (composite) return false;
  }
  return true;
}

namespace detail {

inline uint64_t pollard_rho(uint64_t n) {
  if ((n & 1) == 0) return 2;
  // Brent's cycle variant; the increment c walks until a factor shows up.
  for (uint64_t c = 1;; ++c) {
    auto step = [&](uint64_t x) { return (mulmod_u64(x, x, n) + c) % n; };
    uint64_t x = 2, y = 2, d = 1;
    uint64_t power = 1, lam = 1;
    while (d == 1) {
      if (power == lam) { x = y; power <<= 1; lam = 0; }
      y = step(y);
      ++lam;
      uint64_t diff = x > y ? x - y : y - x;
      if (diff == 0) break;  // cycle without factor, retry with next c
      d = std::gcd(diff, n);
    }
    if (d != 0 && d != 1 && d != n) return d;
  }
}

inline void factor_rec(uint64_t n, std::vector<uint64_t>& out) {
  while (n > 1) {
    if (is_prime_u64(n)) { out.push_back(n); return; }
    uint64_t d = pollard_rho(n);
    factor_rec(d, out);
    n /= d;
  }
}

}  // namespace detail

// Prime factorization of n as (p, multiplicity), ascending in p.  f(1) -> {}.
inline std::vector<std::pair<uint64_t, int>> factorize_u64(uint64_t n) {
  std::vector<uint64_t> primes;
  // Strip small factors cheaply before handing off to rho.
  for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    while (n % p == 0) { primes.push_back(p); n /= p; }
    if (n == 1) break;
  }
  if (n > 1) detail::factor_rec(n, primes);
  std::sort(primes.begin(), primes.end());
  std::vector<std::pair<uint64_t, int>> out;
  for (uint64_t p : primes) {
    if (!out.empty() && out.back().first == p) {
      ++out.back().second;
    } else {
      out.emplace_back(p, 1);
    }
  }
  return out;
}

}  // namespace addigit
