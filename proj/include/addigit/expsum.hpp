#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "addigit/digits.hpp"
#include "addigit/errors.hpp"
#include "addigit/primes.hpp"
#include "addigit/sieve.hpp"

namespace addigit {

using cplx = std::complex<double>;

// e(t) = exp(2 pi i t).
inline cplx unit_phase(double t) {
  double a = 2.0 * std::numbers::pi * t;
  return {std::cos(a), std::sin(a)};
}

// e(r / B) for an integer residue, with exact conjugate symmetry: negating a
// residue negates the imaginary part bit for bit, and the half turn is exactly
// -1.  Sums built from these phases satisfy S(-a) = conj(S(a)) identically.
inline cplx residue_phase(uint64_t r, uint64_t modulus) {
  if (r == 0) return {1.0, 0.0};
  if (2 * r == modulus) return {-1.0, 0.0};
  if (2 * r > modulus) return std::conj(residue_phase(modulus - r, modulus));
  return unit_phase(static_cast<double>(r) / static_cast<double>(modulus));
}

// Pairwise fold in fixed order; the result depends only on the chunk values,
// not on which thread produced them.
inline cplx tree_sum(std::vector<cplx> v) {
  if (v.empty()) return {0.0, 0.0};
  while (v.size() > 1) {
    size_t half = (v.size() + 1) / 2;
    for (size_t i = 0; i < half; ++i) {
      size_t j = 2 * i;
      v[i] = j + 1 < v.size() ? v[j] + v[j + 1] : v[j];
    }
    v.resize(half);
  }
  return v[0];
}

// Partial sums S(x) = sum_{n <= x} e(a f(n) / b^m) on an increasing grid.
struct exp_sum_record {
  std::string spec_name;
  int64_t a = 1;
  int m = 1;
  int base = 10;
  std::vector<uint64_t> x_grid;
  std::vector<cplx> sums;
};

namespace detail {

// Per-n phase evaluator.  Integer-valued specs reduce a*f(n) mod b^m exactly
// before touching floating point; everything else goes through a double
// fractional part.
class phase_eval {
 public:
  phase_eval(const additive_spec& spec, int64_t a, int m, base_b base) : spec_(&spec) {
    uint64_t bm = 1;
    bool fits = true;
    for (int i = 0; i < m; ++i) {
      if (bm > (1ull << 62) / static_cast<uint64_t>(base.value)) { fits = false; break; }
      bm *= static_cast<uint64_t>(base.value);
    }
    exact_ = spec.integer_valued() && fits;
    if (exact_) {
      modulus_ = bm;
      int64_t r = a % static_cast<int64_t>(bm);
      if (r < 0) r += static_cast<int64_t>(bm);
      a_res_ = static_cast<uint64_t>(r);
      if (modulus_ <= 65536) {
        table_.resize(modulus_);
        for (uint64_t i = 0; i < modulus_; ++i) table_[i] = residue_phase(i, modulus_);
      }
    } else {
      scale_ = static_cast<double>(a) / std::pow(static_cast<double>(base.value), m);
    }
  }

  bool exact() const { return exact_; }

  cplx at_u64(uint64_t fv) const {
    uint64_t r = mulmod_u64(a_res_, fv % modulus_, modulus_);
    if (!table_.empty()) return table_[r];
    return residue_phase(r, modulus_);
  }
  cplx at_real(double fv) const {
    // fmod keeps the sign, and cos/sin are exactly even/odd, so negating a
    // preserves conjugation bit for bit here too.
    return unit_phase(std::fmod(scale_ * fv, 1.0));
  }
  // Phase of a single f-value through whichever route applies.
  cplx of_value(double fv) const {
    if (exact_ && fv >= 0 && std::floor(fv) == fv && fv < 9.2e18)
      return at_u64(static_cast<uint64_t>(fv));
    double t = exact_ ? static_cast<double>(a_res_) / static_cast<double>(modulus_) * fv
                      : scale_ * fv;
    return unit_phase(t - std::floor(t));
  }

 private:
  const additive_spec* spec_;
  bool exact_ = false;
  uint64_t modulus_ = 1;
  uint64_t a_res_ = 0;
  double scale_ = 0.0;
  std::vector<cplx> table_;
};

}  // namespace detail

inline exp_sum_record exp_sum(const additive_spec& spec, int64_t a, int m, base_b base,
                              std::vector<uint64_t> x_grid, const run_options& opts = {}) {
  if (a == 0) throw config_error("exp_sum requires a != 0");
  if (m < 1) throw config_error("exp_sum requires m >= 1");
  if (x_grid.empty()) throw config_error("exp_sum requires a non-empty grid");
  for (size_t i = 0; i < x_grid.size(); ++i) {
    if (x_grid[i] < 1 || (i > 0 && x_grid[i] <= x_grid[i - 1]))
      throw config_error("exp_sum grid must be strictly increasing and >= 1");
  }

  const uint64_t x_max = x_grid.back();
  if (opts.segment_len * 16 > opts.memory_budget)
    throw resource_error("exp_sum: segment length exceeds memory budget");
  detail::phase_eval phase(spec, a, m, base);

  // Chunk boundaries: segment-sized cuts plus a cut at every grid point, so a
  // grid prefix is always a whole number of chunks.
  std::vector<uint64_t> cuts;
  cuts.push_back(1);
  for (uint64_t g : x_grid) cuts.push_back(g + 1);
  for (uint64_t s = 1 + opts.segment_len; s <= x_max; s += opts.segment_len) cuts.push_back(s);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Kahan-compensated accumulation: chunks hold up to segment_len unit
  // vectors, and plain summation would drift by ~n * ulp(|S|).
  struct compensated {
    double sum = 0.0, carry = 0.0;
    void add(double v) {
      double y = v - carry;
      double t = sum + y;
      carry = (t - sum) - y;
      sum = t;
    }
  };
  std::vector<cplx> chunk_sums(cuts.size() - 1);
  auto sum_chunk_u64 = [&](std::span<const uint64_t> vals) {
    compensated re, im;
    // The exact residue route needs b^m to fit; otherwise the integer values
    // go through the floating path like everything else.
    for (uint64_t v : vals) {
      cplx p = phase.exact() ? phase.at_u64(v) : phase.at_real(static_cast<double>(v));
      re.add(p.real());
      im.add(p.imag());
    }
    return cplx{re.sum, im.sum};
  };
  auto sum_chunk_real = [&](std::span<const double> vals) {
    compensated re, im;
    for (double v : vals) {
      cplx p = phase.at_real(v);
      re.add(p.real());
      im.add(p.imag());
    }
    return cplx{re.sum, im.sum};
  };

  auto base_primes = base_primes_for(x_max + 1);
  run_segments(0, cuts.size() - 1, 1, opts.threads, [&](size_t ci, uint64_t, uint64_t) {
    uint64_t lo = cuts[ci], hi = cuts[ci + 1];
    thread_local std::vector<uint64_t> vi;
    thread_local std::vector<double> vd;
    thread_local std::vector<uint64_t> divisor;
    if (spec.integer_valued()) {
      detail::sieve_segment<uint64_t>(spec, lo, hi, base_primes, vi, divisor);
      chunk_sums[ci] = sum_chunk_u64(vi);
    } else {
      detail::sieve_segment<double>(spec, lo, hi, base_primes, vd, divisor);
      chunk_sums[ci] = sum_chunk_real(vd);
    }
  });

  exp_sum_record rec;
  rec.spec_name = spec.name();
  rec.a = a;
  rec.m = m;
  rec.base = base.value;
  rec.x_grid = std::move(x_grid);
  rec.sums.reserve(rec.x_grid.size());
  for (uint64_t g : rec.x_grid) {
    size_t upto = 0;
    while (upto + 1 < cuts.size() && cuts[upto + 1] <= g + 1) ++upto;
    rec.sums.push_back(tree_sum(std::vector<cplx>(
        chunk_sums.begin(), chunk_sums.begin() + static_cast<ptrdiff_t>(upto))));
  }
  for (const cplx& s : rec.sums)
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw numeric_error("exp_sum produced a non-finite value");
  return rec;
}

// Gamma on the complex plane (Lanczos g=7 with reflection).
inline cplx complex_gamma(cplx z) {
  static const double coef[9] = {
      0.99999999999980993,  676.5203681218851,   -1259.1392167224028,
      771.32342877765313,   -176.61502916214059, 12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  const double pi = std::numbers::pi;
  if (z.imag() == 0.0 && z.real() == std::floor(z.real()) && z.real() <= 0.0)
    throw numeric_error("gamma pole at non-positive integer");
  if (z.real() < 0.5) return pi / (std::sin(pi * z) * complex_gamma(1.0 - z));
  z -= 1.0;
  cplx acc = coef[0];
  for (int i = 1; i < 9; ++i) acc += coef[i] / (z + static_cast<double>(i));
  cplx t = z + 7.5;
  return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

// Multiplicative coefficients behind the truncated Dirichlet series at a
// fixed threshold x: the true phases e(a f(p^k)/b^m) while p^k <= x, the
// additive-split form e(a (f(p^(k-1)) + f(p))/b^m) for p <= x < p^k, and the
// constant-c form e(a k c/b^m) beyond x.  Every value lies on the unit circle.
class coefficient_system {
 public:
  coefficient_system(const additive_spec& spec, int64_t a, int m, base_b base)
      : spec_(&spec), phase_(spec, a, m, base) {}

  cplx at(uint64_t p, unsigned k, uint64_t x) const {
    if (p > x) return phase_.of_value(static_cast<double>(k) * spec_->prime_constant());
    if (power_at_most(p, k, x)) return phase_.of_value(spec_->value(p, k));
    return phase_.of_value(spec_->value(p, k - 1) + spec_->prime_value(p));
  }

  cplx unit_for_constant() const { return phase_.of_value(spec_->prime_constant()); }

 private:
  static bool power_at_most(uint64_t p, unsigned k, uint64_t x) {
    uint64_t pk = 1;
    for (unsigned i = 0; i < k; ++i) {
      if (pk > x / p) return false;
      pk *= p;
    }
    return pk <= x;
  }
  const additive_spec* spec_;
  detail::phase_eval phase_;
};

// 1/Gamma(z): entire, so the poles of Gamma become plain zeros.
inline cplx complex_gamma_reciprocal(cplx z) {
  if (z.imag() == 0.0 && z.real() == std::floor(z.real()) && z.real() <= 0.0)
    return {0.0, 0.0};
  return 1.0 / complex_gamma(z);
}

// P-truncated G(z) = prod_{p <= P} (1 - z/p)^(-1) (1 - 1/p)^z.  G(1) = 1 with
// every factor identically one.
inline cplx euler_g(cplx z, uint64_t prime_bound) {
  cplx prod{1.0, 0.0};
  for_each_prime(2, prime_bound + 1, [&](uint64_t p) {
    double inv = 1.0 / static_cast<double>(p);
    cplx factor = std::exp(z * std::log1p(-inv)) / (1.0 - z * inv);
    prod *= factor;
  });
  return prod;
}

// Selberg-Delange style prediction of S(x): the main term
// x (log x)^(c'-1) G(1;c') / Gamma(c') with c' = e(a c / b^m), the Euler
// products truncated at prime_bound and the coefficient sums carried to
// numerical convergence (coefficients switch to their p^k > x form past x).
struct sd_prediction {
  cplx c_prime{1.0, 0.0};
  cplx gamma_recip{1.0, 0.0};
  uint64_t prime_bound = 0;
  std::vector<uint64_t> x_grid;
  std::vector<cplx> main_term;
  std::vector<cplx> g_value;        // G(1;c') per grid point
  std::vector<double> tail_proxy;   // |last factor - 1| of the truncated product
  bool converged = true;
};

inline sd_prediction sd_main_term(const additive_spec& spec, int64_t a, int m, base_b base,
                                  const std::vector<uint64_t>& x_grid, uint64_t prime_bound,
                                  double tail_tolerance = 1e-8) {
  if (prime_bound < 100) throw config_error("sd_main_term requires prime bound >= 100");
  if (m < 1) throw config_error("sd_main_term requires m >= 1");
  for (uint64_t g : x_grid)
    if (g < 3) throw config_error("sd_main_term grid entries must be >= 3");

  coefficient_system coeffs(spec, a, m, base);
  sd_prediction pred;
  pred.prime_bound = prime_bound;
  pred.x_grid = x_grid;
  pred.c_prime = coeffs.unit_for_constant();
  pred.gamma_recip = complex_gamma_reciprocal(pred.c_prime);
  const cplx g_at_cprime = euler_g(pred.c_prime, prime_bound);

  for (uint64_t x : x_grid) {
    cplx prod{1.0, 0.0};
    double last_gap = 0.0;
    // Coefficient factors are exactly 1 for p > x, so the product stops at
    // min(P, x) no matter how the two bounds interleave.
    uint64_t p_hi = std::min(prime_bound, x);
    for_each_prime(2, p_hi + 1, [&](uint64_t p) {
      double inv_p = 1.0 / static_cast<double>(p);
      cplx coeff_sum{0.0, 0.0};
      cplx a_p{0.0, 0.0};
      double pk_inv = 1.0;
      for (unsigned k = 1;; ++k) {
        pk_inv *= inv_p;
        if (pk_inv < 1e-18) break;
        cplx coeff = coeffs.at(p, k, x);
        if (k == 1) a_p = coeff;
        coeff_sum += coeff * pk_inv;
      }
      cplx factor = (1.0 + coeff_sum) * (1.0 - a_p * inv_p);
      prod *= factor;
      last_gap = std::abs(factor - 1.0);
    });
    cplx g_total = g_at_cprime * prod;
    double loglog = std::log(std::log(static_cast<double>(x)));
    cplx main = static_cast<double>(x) * std::exp((pred.c_prime - 1.0) * loglog) *
                g_total * pred.gamma_recip;
    if (!std::isfinite(main.real()) || !std::isfinite(main.imag()))
      throw numeric_error("sd_main_term produced a non-finite value");
    pred.main_term.push_back(main);
    pred.g_value.push_back(g_total);
    pred.tail_proxy.push_back(last_gap);
    if (last_gap > tail_tolerance) pred.converged = false;
  }
  return pred;
}

// x * e(a c log log x / b^m) per grid point.
inline std::vector<cplx> phase_prediction(double c, int64_t a, int m, base_b base,
                                          const std::vector<uint64_t>& x_grid) {
  std::vector<cplx> out;
  out.reserve(x_grid.size());
  double bm = std::pow(static_cast<double>(base.value), m);
  for (uint64_t x : x_grid) {
    if (x < 3) throw config_error("phase_prediction grid entries must be >= 3");
    double t = static_cast<double>(a) * c * std::log(std::log(static_cast<double>(x))) / bm;
    out.push_back(static_cast<double>(x) * unit_phase(t - std::floor(t)));
  }
  return out;
}

enum class trend_covariate { log_x, log_log_x };

struct decay_profile_result {
  std::vector<double> ratio;  // |S(x)| / x per grid point
  double slope = 0.0;
  std::string verdict;        // "decay", "no-decay", or "zero"
};

// Normalized magnitudes with a least-squares trend of log(|S|/x) against the
// chosen log-scale covariate.
inline decay_profile_result decay_profile(const exp_sum_record& rec,
                                          trend_covariate cov = trend_covariate::log_log_x) {
  if (rec.sums.empty()) throw config_error("decay_profile of an empty record");
  decay_profile_result out;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t n = 0;
  for (size_t i = 0; i < rec.sums.size(); ++i) {
    double r = std::abs(rec.sums[i]) / static_cast<double>(rec.x_grid[i]);
    out.ratio.push_back(r);
    if (r > 0.0) {
      double cx = cov == trend_covariate::log_x
                      ? std::log(static_cast<double>(rec.x_grid[i]))
                      : std::log(std::log(static_cast<double>(rec.x_grid[i])));
      double cy = std::log(r);
      sx += cx; sy += cy; sxx += cx * cx; sxy += cx * cy;
      ++n;
    }
  }
  if (n == 0) {
    out.verdict = "zero";
    return out;
  }
  double denom = static_cast<double>(n) * sxx - sx * sx;
  out.slope = denom != 0.0 ? (static_cast<double>(n) * sxy - sx * sy) / denom : 0.0;
  out.verdict = out.slope < -0.01 ? "decay" : "no-decay";
  return out;
}

}  // namespace addigit
