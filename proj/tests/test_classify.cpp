#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "addigit/classify.hpp"
#include "oracles.hpp"

using namespace addigit;
using Catch::Approx;

TEST_CASE("b_eps clips and vanishes when f(p) = c") {
  auto om = additive_spec::little_omega();
  CHECK(b_eps(om, 1.0, 1e6, 97, 0.4) == 0.0);
  CHECK(b_eps(additive_spec::big_omega(), 1.0, 1e6, 7, 0.4) == 0.0);

  additive_spec off(additivity::strongly_additive, value_kind::exact_integer, 1,
                    {{5, 6}}, {}, "off");  // f(5) = c + 5
  // (loglog 1e3)^(0.1) ~ 1.07 <= 2.5, so the deviation 5 clips at 2.
  CHECK(b_eps(off, 1.0, 1e3, 5, 0.4) == 2.0);
  CHECK(b_eps(off, 1.0, 1e3, 7, 0.4) == 0.0);
}

TEST_CASE("kernels stay within [0, 2] for adversarial values") {
  additive_spec wild(additivity::table_with_default, value_kind::exact_integer, 1,
                     {{2, 1000000}}, {{{3, 2}, 999999937ull}}, "wild");
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    double x = 10.0 + static_cast<double>(rng() % 100000000);
    double eps = 0.05 + 0.001 * static_cast<double>(rng() % 1000);
    uint64_t p = (rng() % 2) ? 2 : 3;
    double b = b_eps(wild, 1.0, x, p, eps);
    double c = c_eps(wild, x, p, 2, eps);
    REQUIRE(b >= 0.0);
    REQUIRE(b <= 2.0);
    REQUIRE(c >= 0.0);
    REQUIRE(c <= 2.0);
  }
}

TEST_CASE("acp ratio is exactly 1/log x when f(p) = c") {
  for (const additive_spec& spec :
       {additive_spec::little_omega(), additive_spec::big_omega()}) {
    auto rep = classifier_diagnostics(spec, 1.0, 0.25, {0.1, 0.4}, {1000, 10000, 100000});
    for (const auto& cell : rep.cells)
      REQUIRE(cell.acp_ratio == 1.0 / std::log(static_cast<double>(cell.x)));
    CHECK(rep.acp_verdict == "consistent-with-ACP");
  }
}

TEST_CASE("acp ratio decreases for a power-decay perturbation of c") {
  // f(p) = 1 + p^(-1/4) listed explicitly for every prime in range.
  std::map<uint64_t, double> rule;
  for_each_prime(2, 100000, [&](uint64_t p) {
    rule[p] = 1.0 + std::pow(static_cast<double>(p), -0.25);
  });
  additive_spec f(additivity::strongly_additive, value_kind::real_valued, 1.0,
                  std::move(rule), {}, "perturbed");
  auto rep = classifier_diagnostics(f, 1.0, 0.125, {0.1}, {1000, 10000, 100000});
  REQUIRE(rep.cells.size() == 3);
  CHECK(rep.cells[0].acp_ratio > rep.cells[1].acp_ratio);
  CHECK(rep.cells[1].acp_ratio > rep.cells[2].acp_ratio);
  CHECK(rep.acp_verdict == "consistent-with-ACP");

  // Direct prime-sum oracle at the middle grid point.
  double x = 10000;
  double w = std::pow(std::log(std::log(x)), 0.1 / 4.0);
  double sum = 0.0;
  for (uint64_t p = 2; p <= 10000; ++p) {
    if (!oracle::is_prime(p)) continue;
    double dev = std::pow(static_cast<double>(p), -0.25);
    sum += std::min(2.0, dev / w) / std::pow(static_cast<double>(p), 1.0 - 0.125);
  }
  CHECK(rep.cells[1].acp_ratio == Approx(std::exp(sum) / std::log(x)).epsilon(1e-12));
}

TEST_CASE("completely additive functions have weak product exactly one") {
  auto rep = classifier_diagnostics(additive_spec::big_omega(), 1.0, 0.25,
                                    {0.1, 0.2, 0.4, 0.8}, {1000, 10000, 100000});
  for (const auto& cell : rep.cells) REQUIRE(cell.weak_product == 1.0);
  CHECK(rep.weak_verdict == "consistent-with-WA");
}

TEST_CASE("omega weak product matches the direct oracle and drifts toward one") {
  auto rep = classifier_diagnostics(additive_spec::little_omega(), 1.0, 0.25, {0.1},
                                    {1000, 10000, 100000, 1000000});
  // Direct product oracle: |f(p^k)-f(p^(k-1))-f(p)| = 1 for every k >= 2.
  for (const auto& cell : rep.cells) {
    double w = std::pow(std::log(std::log(static_cast<double>(cell.x))), 1.0 + cell.eps / 4.0);
    double prod = 1.0;
    for (uint64_t p = 2; p * p <= cell.x; ++p) {
      if (!oracle::is_prime(p)) continue;
      double sum = 0.0;
      double pk = static_cast<double>(p);
      for (unsigned k = 2; pk * p <= static_cast<double>(cell.x); ++k) {
        pk *= static_cast<double>(p);
        sum += (1.0 / w) / pk;
      }
      prod *= 1.0 - sum;
    }
    REQUIRE(cell.weak_product == Approx(prod).epsilon(1e-9));
    REQUIRE(cell.weak_product > 0.0);
    REQUIRE(cell.weak_product < 1.0);
  }
  for (size_t i = 1; i < rep.cells.size(); ++i)
    CHECK(std::abs(1.0 - rep.cells[i].weak_product) <
          std::abs(1.0 - rep.cells[i - 1].weak_product));
  CHECK(rep.weak_verdict == "consistent-with-WA");
}

TEST_CASE("huge prime-power overrides stay clipped and keep factors positive") {
  additive_spec wild(additivity::table_with_default, value_kind::exact_integer, 1, {},
                     {{{2, 2}, 1000000000ull}, {{2, 3}, 2000000000ull}, {{3, 2}, 500000000ull}},
                     "wild");
  auto rep = classifier_diagnostics(wild, 1.0, 0.25, {0.1}, {1000, 100000});
  for (const auto& cell : rep.cells) {
    // The clip at 2 caps sum_k C/p^k strictly below 1, so no factor can dip
    // to zero, and the anomaly flag stays quiet.
    REQUIRE(cell.weak_product > 0.0);
    REQUIRE(cell.weak_product <= 1.0);
    REQUIRE_FALSE(cell.anomaly);
  }
}

TEST_CASE("verdicts are a pure function of the grids") {
  auto om = additive_spec::little_omega();
  auto a = classifier_diagnostics(om, 1.0, 0.25, {0.1, 0.4}, {1000, 10000});
  auto b = classifier_diagnostics(om, 1.0, 0.25, {0.1, 0.4}, {1000, 10000});
  CHECK(a.acp_verdict == b.acp_verdict);
  CHECK(a.weak_verdict == b.weak_verdict);
  for (size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].acp_ratio == b.cells[i].acp_ratio);
    CHECK(a.cells[i].weak_product == b.cells[i].weak_product);
  }
}

TEST_CASE("classifier rejects bad grids") {
  auto om = additive_spec::little_omega();
  CHECK_THROWS_AS(classifier_diagnostics(om, 1.0, 0.6, {0.1}, {1000}), config_error);
  CHECK_THROWS_AS(classifier_diagnostics(om, 1.0, 0.25, {}, {1000}), config_error);
  CHECK_THROWS_AS(classifier_diagnostics(om, 1.0, 0.25, {0.1}, {1000, 1000}), config_error);
}

TEST_CASE("ek_stats histograms f(n) exactly") {
  auto rep = ek_stats(additive_spec::little_omega(), 10);
  CHECK(rep.sample_mean == Approx(1.1));
  REQUIRE(rep.histogram.size() == 3);
  CHECK(rep.histogram[0] == 1);
  CHECK(rep.histogram[1] == 7);
  CHECK(rep.histogram[2] == 2);

  uint64_t total = 0;
  for (uint64_t c : rep.histogram) total += c;
  CHECK(total == rep.x);

  // Mean and variance recompute exactly from the histogram.
  double mean = 0, sq = 0;
  for (size_t v = 0; v < rep.histogram.size(); ++v) {
    mean += static_cast<double>(rep.histogram[v]) * v;
    sq += static_cast<double>(rep.histogram[v]) * v * v;
  }
  mean /= static_cast<double>(rep.x);
  sq /= static_cast<double>(rep.x);
  CHECK(rep.sample_mean == Approx(mean).epsilon(1e-15));
  CHECK(rep.sample_variance == Approx(sq - mean * mean).epsilon(1e-15));
}

TEST_CASE("ek_stats of the zero function is degenerate") {
  additive_spec zero(additivity::table_with_default, value_kind::exact_integer, 0, {}, {},
                     "zero");
  auto rep = ek_stats(zero, 500);
  CHECK(rep.sample_mean == 0.0);
  CHECK(rep.sample_variance == 0.0);
  REQUIRE(rep.histogram.size() == 1);
  CHECK(rep.histogram[0] == 500);
}

TEST_CASE("ek_stats concentration counts are consistent with the histogram") {
  auto rep = ek_stats(additive_spec::little_omega(), 100000);
  CHECK(rep.within_sigma[0] <= rep.within_sigma[1]);
  CHECK(rep.within_sigma[1] <= rep.within_sigma[2]);
  CHECK(rep.within_sigma[2] <= rep.x);
  double center = std::log(std::log(100000.0));
  double sigma = std::sqrt(center);
  uint64_t direct = 0;
  for (size_t v = 0; v < rep.histogram.size(); ++v)
    if (std::abs(static_cast<double>(v) - center) <= 2 * sigma) direct += rep.histogram[v];
  CHECK(rep.within_sigma[1] == direct);
  CHECK(rep.mean_sum > 0.0);
  CHECK(rep.variance_sum > 0.0);
  CHECK_THROWS_AS(ek_stats(additive_spec(additivity::strongly_additive,
                                         value_kind::real_valued, 0.5, {}, {}, "r"),
                           100),
                  config_error);
}

TEST_CASE("ek_stats is deterministic across thread counts") {
  run_options a, b;
  a.threads = 1;
  b.threads = 4;
  a.segment_len = b.segment_len = 1 << 12;
  auto ra = ek_stats(additive_spec::little_omega(), 50000, a);
  auto rb = ek_stats(additive_spec::little_omega(), 50000, b);
  CHECK(ra.histogram == rb.histogram);
  CHECK(ra.sample_mean == rb.sample_mean);
}

TEST_CASE("bias census of the zero function sees only zeros") {
  additive_spec zero(additivity::table_with_default, value_kind::exact_integer, 0, {}, {},
                     "zero");
  auto censuses = bias_demo(zero, base_b(2), 1000, {1, 3, 7});
  for (const auto& c : censuses) {
    CHECK(c.counts[0] == 1000);
    CHECK(c.counts[1] == 0);
    CHECK(c.positions == 1000);
  }
}

TEST_CASE("bias census of the parity bit matches a direct count") {
  uint64_t x = 10000;
  auto censuses = bias_demo(additive_spec::little_omega(), base_b(2), x, {1});
  uint64_t odd = 0;
  for (uint64_t n = 1; n <= x; ++n)
    if (oracle::eval_u64(additive_spec::little_omega(), n) % 2 == 1) ++odd;
  CHECK(censuses[0].counts[1] == odd);
  CHECK(censuses[0].counts[0] == x - odd);
  double freq = static_cast<double>(odd) / static_cast<double>(x);
  CHECK(freq > 0.2);
  CHECK(freq < 0.8);
}
