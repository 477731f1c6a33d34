#pragma once

#include <cmath>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "addigit/additive.hpp"
#include "addigit/blocks.hpp"
#include "addigit/errors.hpp"
#include "addigit/primes.hpp"
#include "addigit/sieve.hpp"

namespace addigit {

namespace detail {
inline double log_log_power(double x, double exponent) {
  static const double e_to_e = std::exp(std::exp(1.0));
  if (!(x > e_to_e)) return 1.0;  // the weight degenerates below e^e
  return std::pow(std::log(std::log(x)), exponent);
}
}  // namespace detail

// Clipped prime deviation min{2, |f(p) - c| / (log log x)^(eps/4)}.
inline double b_eps(const additive_spec& spec, double c, double x, uint64_t p, double eps) {
  double dev = std::abs(spec.prime_value(p) - c);
  return std::min(2.0, dev / detail::log_log_power(x, eps / 4.0));
}

// Clipped prime-power correction min{2, |f(p^k)-f(p^(k-1))-f(p)| / (log log x)^(1+eps/4)}.
inline double c_eps(const additive_spec& spec, double x, uint64_t p, unsigned k, double eps) {
  double dev = std::abs(spec.value(p, k) - spec.value(p, k - 1) - spec.prime_value(p));
  return std::min(2.0, dev / detail::log_log_power(x, 1.0 + eps / 4.0));
}

struct classifier_cell {
  uint64_t x = 0;
  double eps = 0.0;
  double acp_ratio = 0.0;     // exp(sum_p B_eps / p^(1-delta)) / log x
  double weak_product = 1.0;  // prod_p (1 - sum_k C_eps / p^k)
  bool anomaly = false;       // some factor of the weak product was <= 0
};

struct classifier_report {
  double c = 0.0;
  double delta = 0.25;
  std::vector<double> eps_grid;
  std::vector<uint64_t> x_grid;
  std::vector<classifier_cell> cells;  // x-major, eps-minor
  std::string acp_verdict;             // "consistent-with-ACP" or "inconclusive"
  std::string weak_verdict;            // "consistent-with-WA" or "inconclusive"
};

// Both classifier diagnostics over an (x, eps) grid.  Prime sums and products
// accumulate in ascending p, so results are reproducible bit for bit.
inline classifier_report classifier_diagnostics(const additive_spec& spec, double c,
                                                double delta,
                                                std::vector<double> eps_grid,
                                                std::vector<uint64_t> x_grid) {
  if (!(delta > 0.0 && delta < 0.5)) throw config_error("delta must lie in (0, 1/2)");
  if (eps_grid.empty() || x_grid.empty()) throw config_error("classifier grids must be non-empty");
  for (size_t i = 1; i < x_grid.size(); ++i)
    if (x_grid[i] <= x_grid[i - 1]) throw config_error("classifier x grid must be increasing");
  for (double e : eps_grid)
    if (!(e > 0.0)) throw config_error("classifier eps values must be positive");

  classifier_report rep;
  rep.c = c;
  rep.delta = delta;
  rep.eps_grid = std::move(eps_grid);
  rep.x_grid = std::move(x_grid);

  const size_t ne = rep.eps_grid.size();
  for (uint64_t x : rep.x_grid) {
    std::vector<double> acp_weight(ne), weak_weight(ne);
    for (size_t e = 0; e < ne; ++e) {
      acp_weight[e] = detail::log_log_power(static_cast<double>(x), rep.eps_grid[e] / 4.0);
      weak_weight[e] = detail::log_log_power(static_cast<double>(x), 1.0 + rep.eps_grid[e] / 4.0);
    }
    std::vector<double> acp_sum(ne, 0.0);
    std::vector<double> weak_prod(ne, 1.0);
    std::vector<char> anomaly(ne, 0);
    for_each_prime(2, x + 1, [&](uint64_t p) {
      double dev = std::abs(spec.prime_value(p) - c);
      if (dev != 0.0) {
        double p_pow = std::pow(static_cast<double>(p), 1.0 - delta);
        for (size_t e = 0; e < ne; ++e)
          acp_sum[e] += std::min(2.0, dev / acp_weight[e]) / p_pow;
      }
      if (p <= x / p) {
        for (size_t e = 0; e < ne; ++e) {
          double corr = 0.0;
          uint64_t pk = p;
          for (unsigned k = 2; pk <= x / p; ++k) {
            pk *= p;
            double cdev = std::abs(spec.value(p, k) - spec.value(p, k - 1) - spec.prime_value(p));
            corr += std::min(2.0, cdev / weak_weight[e]) / static_cast<double>(pk);
          }
          double factor = 1.0 - corr;
          if (factor <= 0.0) anomaly[e] = 1;
          weak_prod[e] *= factor;
        }
      }
    });
    for (size_t e = 0; e < ne; ++e) {
      classifier_cell cell;
      cell.x = x;
      cell.eps = rep.eps_grid[e];
      cell.acp_ratio = std::exp(acp_sum[e]) / std::log(static_cast<double>(x));
      cell.weak_product = weak_prod[e];
      cell.anomaly = anomaly[e];
      rep.cells.push_back(cell);
    }
  }

  // Trend verdicts: finite-scale consistency checks only, never a decision of
  // the asymptotic property.
  bool acp_ok = true, weak_ok = true;
  for (size_t e = 0; e < ne; ++e) {
    for (size_t xi = 1; xi < rep.x_grid.size(); ++xi) {
      const auto& prev = rep.cells[(xi - 1) * ne + e];
      const auto& cur = rep.cells[xi * ne + e];
      if (!(cur.acp_ratio < prev.acp_ratio)) acp_ok = false;
      if (std::abs(1.0 - cur.weak_product) > std::abs(1.0 - prev.weak_product)) weak_ok = false;
    }
  }
  rep.acp_verdict = acp_ok ? "consistent-with-ACP" : "inconclusive";
  rep.weak_verdict = weak_ok ? "consistent-with-WA" : "inconclusive";
  return rep;
}

inline classifier_report acp_diagnostic(const additive_spec& spec, double c, double delta,
                                        std::vector<double> eps_grid,
                                        std::vector<uint64_t> x_grid) {
  return classifier_diagnostics(spec, c, delta, std::move(eps_grid), std::move(x_grid));
}

inline classifier_report weak_diagnostic(const additive_spec& spec,
                                         std::vector<double> eps_grid,
                                         std::vector<uint64_t> x_grid) {
  return classifier_diagnostics(spec, spec.prime_constant(), 0.25, std::move(eps_grid),
                                std::move(x_grid));
}

// Value histogram of f(n) for n <= x with moment and concentration summaries.
struct ek_report {
  uint64_t x = 0;
  std::vector<uint64_t> histogram;  // histogram[v] = #{n <= x : f(n) = v}
  double sample_mean = 0.0;
  double sample_variance = 0.0;
  double mean_sum = 0.0;            // A_x = sum_{p<x} f(p)/p
  double variance_sum = 0.0;        // B_x = sum_{p<x} f(p)^2/p
  uint64_t within_sigma[3] = {0, 0, 0};  // counts |f(n) - loglog x| <= t sqrt(loglog x)
};

inline ek_report ek_stats(const additive_spec& spec, uint64_t x, const run_options& opts = {}) {
  if (!spec.integer_valued())
    throw config_error("ek_stats requires an exact-integer function");
  if (x < 2) throw config_error("ek_stats requires x >= 2");

  ek_report rep;
  rep.x = x;
  std::mutex mu;
  for_each_factored_segment<uint64_t>(spec, 1, x + 1, opts,
      [&](size_t, uint64_t, std::span<const uint64_t> vals) {
        std::vector<uint64_t> local;
        for (uint64_t v : vals) {
          if (v >= (1u << 27)) throw resource_error("ek_stats: histogram support too large");
          if (v >= local.size()) local.resize(v + 1, 0);
          ++local[v];
        }
        std::lock_guard<std::mutex> lock(mu);
        if (local.size() > rep.histogram.size()) rep.histogram.resize(local.size(), 0);
        for (size_t v = 0; v < local.size(); ++v) rep.histogram[v] += local[v];
      });

  unsigned __int128 sum = 0, sum_sq = 0;
  for (size_t v = 0; v < rep.histogram.size(); ++v) {
    sum += static_cast<unsigned __int128>(rep.histogram[v]) * v;
    sum_sq += static_cast<unsigned __int128>(rep.histogram[v]) * v * v;
  }
  double n = static_cast<double>(x);
  rep.sample_mean = static_cast<double>(sum) / n;
  rep.sample_variance = static_cast<double>(sum_sq) / n - rep.sample_mean * rep.sample_mean;

  auto pm = prime_moments(spec, x);
  rep.mean_sum = pm.mean_sum;
  rep.variance_sum = pm.variance_sum;

  double center = std::log(std::log(static_cast<double>(x)));
  double sigma = std::sqrt(center);
  for (int t = 1; t <= 3; ++t) {
    uint64_t count = 0;
    for (size_t v = 0; v < rep.histogram.size(); ++v)
      if (std::abs(static_cast<double>(v) - center) <= t * sigma) count += rep.histogram[v];
    rep.within_sigma[t - 1] = count;
  }
  return rep;
}

// Census of the digit of floor(f(n)) at each requested position (least
// significant = 1) across n <= x.  High positions expose the concentration of
// f near log log x that breaks wide-window normality.
inline std::vector<block_census> bias_demo(const additive_spec& spec, base_b base, uint64_t x,
                                           const std::vector<int>& positions,
                                           const run_options& opts = {}) {
  if (positions.empty()) throw config_error("bias_demo requires at least one position");
  for (int pos : positions)
    if (pos < 1) throw config_error("bias_demo positions must be >= 1");

  std::vector<block_census> out;
  for (size_t i = 0; i < positions.size(); ++i) out.push_back(make_census(base, 1));

  std::mutex mu;
  auto scan = [&](std::span<const uint64_t> vi, std::span<const double> vd) {
    std::vector<std::vector<uint64_t>> local(positions.size(),
                                             std::vector<uint64_t>(base.value, 0));
    size_t len = vi.empty() ? vd.size() : vi.size();
    for (size_t i = 0; i < len; ++i) {
      uint64_t v = vi.empty() ? floor_to_u64(std::floor(vd[i])) : vi[i];
      for (size_t j = 0; j < positions.size(); ++j)
        ++local[j][static_cast<size_t>(digit_of(v, positions[j], base))];
    }
    std::lock_guard<std::mutex> lock(mu);
    for (size_t j = 0; j < positions.size(); ++j) {
      for (int d = 0; d < base.value; ++d) out[j].counts[d] += local[j][d];
      out[j].positions += len;
    }
  };
  if (spec.integer_valued()) {
    for_each_factored_segment<uint64_t>(spec, 1, x + 1, opts,
        [&](size_t, uint64_t, std::span<const uint64_t> vals) {
          scan(vals, std::span<const double>());
        });
  } else {
    for_each_factored_segment<double>(spec, 1, x + 1, opts,
        [&](size_t, uint64_t, std::span<const double> vals) {
          scan(std::span<const uint64_t>(), vals);
        });
  }
  return out;
}

}  // namespace addigit
