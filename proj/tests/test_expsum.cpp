#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <random>

#include "addigit/expsum.hpp"
#include "oracles.hpp"

using namespace addigit;
using Catch::Approx;

namespace {
bool bit_identical(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(cplx)) == 0;
}
}  // namespace

TEST_CASE("Liouville partial sum vanishes at 10") {
  auto rec = exp_sum(additive_spec::big_omega(), 1, 1, base_b(2), {10});
  CHECK(std::abs(rec.sums[0]) < 1e-12);
  auto want = oracle::naive_exp_sum(additive_spec::big_omega(), 1, 1, 2, 10);
  CHECK(std::abs(rec.sums[0] - want) < 1e-12);
}

TEST_CASE("a divisible by b^m makes every term one") {
  auto rec = exp_sum(additive_spec::big_omega(), 4, 2, base_b(2), {1, 57, 1000});
  CHECK(rec.sums[0] == cplx{1.0, 0.0});
  CHECK(rec.sums[1] == cplx{57.0, 0.0});
  CHECK(rec.sums[2] == cplx{1000.0, 0.0});
}

TEST_CASE("sieved sums match the naive oracle") {
  auto om = additive_spec::little_omega();
  auto rec = exp_sum(om, 1, 1, base_b(10), {1000});
  auto want = oracle::naive_exp_sum(om, 1, 1, 10, 1000);
  CHECK(std::abs(rec.sums[0] - want) < 1e-9);

  additive_spec realf(additivity::strongly_additive, value_kind::real_valued, 0.7,
                      {{3, 2.5}}, {}, "realf");
  auto rec2 = exp_sum(realf, 2, 1, base_b(10), {500});
  auto want2 = oracle::naive_exp_sum(realf, 2, 1, 10, 500);
  CHECK(std::abs(rec2.sums[0] - want2) < 1e-9);
}

TEST_CASE("triangle bound holds on a grid") {
  auto rec = exp_sum(additive_spec::little_omega(), 3, 1, base_b(10),
                     {10, 100, 1000, 10000});
  for (size_t i = 0; i < rec.x_grid.size(); ++i)
    CHECK(std::abs(rec.sums[i]) <= static_cast<double>(rec.x_grid[i]) * (1 + 1e-15));
}

TEST_CASE("conjugation and residue periodicity in a") {
  auto om = additive_spec::little_omega();
  auto plus = exp_sum(om, 3, 1, base_b(10), {2000});
  auto minus = exp_sum(om, -3, 1, base_b(10), {2000});
  CHECK(std::abs(minus.sums[0] - std::conj(plus.sums[0])) < 1e-12);

  auto shifted = exp_sum(om, 13, 1, base_b(10), {2000});
  CHECK(bit_identical(plus.sums, shifted.sums));
}

TEST_CASE("exp_sum is bit-stable across thread counts") {
  run_options opts;
  opts.segment_len = 1 << 12;
  std::vector<std::vector<cplx>> runs;
  for (int threads : {1, 2, 4, 8}) {
    opts.threads = threads;
    runs.push_back(exp_sum(additive_spec::little_omega(), 1, 1, base_b(10),
                           {5000, 20000, 100000}, opts)
                       .sums);
  }
  for (size_t i = 1; i < runs.size(); ++i) REQUIRE(bit_identical(runs[0], runs[i]));
}

TEST_CASE("truncated Euler G(1) collapses to one") {
  for (uint64_t P : {1000ull, 100000ull}) {
    cplx g1 = euler_g(cplx{1.0, 0.0}, P);
    CHECK(std::abs(g1 - 1.0) <= 1e-12);
  }
}

TEST_CASE("gamma matches the classical values and the functional equation") {
  CHECK(std::abs(complex_gamma({1.0, 0.0}) - 1.0) < 1e-10);
  CHECK(std::abs(complex_gamma({0.5, 0.0}) - std::sqrt(std::numbers::pi)) <
        1e-10 * std::sqrt(std::numbers::pi));
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  int tested = 0;
  while (tested < 1000) {
    cplx z{1.0 + 0.5 * unit(rng), 0.5 * unit(rng)};
    if (std::abs(z - cplx{1.0, 0.0}) > 0.5) continue;
    ++tested;
    cplx lhs = complex_gamma(z + 1.0);
    cplx rhs = z * complex_gamma(z);
    REQUIRE(std::abs(lhs - rhs) <= 1e-9 * std::abs(lhs));
  }
  CHECK_THROWS_AS(complex_gamma({0.0, 0.0}), numeric_error);
  CHECK_THROWS_AS(complex_gamma({-3.0, 0.0}), numeric_error);
  CHECK(complex_gamma_reciprocal({0.0, 0.0}) == cplx{0.0, 0.0});
  CHECK(complex_gamma_reciprocal({-1.0, 0.0}) == cplx{0.0, 0.0});
  CHECK(std::abs(complex_gamma_reciprocal({0.5, 0.0}) - 1.0 / std::sqrt(std::numbers::pi)) <
        1e-10);
}

TEST_CASE("gamma agrees with an independent Spouge evaluation") {
  std::mt19937_64 rng(577215);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    cplx z{1.0 + 0.5 * unit(rng), 0.5 * unit(rng)};
    if (std::abs(z - cplx{1.0, 0.0}) > 0.5) continue;
    auto want = oracle::spouge_gamma({z.real(), z.imag()});
    cplx got = complex_gamma(z);
    REQUIRE(std::abs(got - cplx{static_cast<double>(want.real()),
                                static_cast<double>(want.imag())}) <=
            1e-9 * std::abs(got));
  }
}

TEST_CASE("coefficient system stays on the unit circle across all three cases") {
  auto om = additive_spec::little_omega();
  coefficient_system cs(om, 3, 2, base_b(10));
  std::mt19937_64 rng(8080);
  for (int i = 0; i < 2000; ++i) {
    uint64_t p = 2 + rng() % 1000;
    if (!oracle::is_prime(p)) continue;
    unsigned k = 1 + static_cast<unsigned>(rng() % 6);
    uint64_t x = 2 + rng() % 100000;
    REQUIRE(std::abs(std::abs(cs.at(p, k, x)) - 1.0) < 1e-14);
  }
  // Case boundaries for p = 2, x = 8: 2^3 <= 8 < 2^4.
  coefficient_system omega_cs(om, 1, 1, base_b(10));
  cplx in_range = omega_cs.at(2, 3, 8);      // e(f(8)/10) = e(1/10)
  cplx split = omega_cs.at(2, 4, 8);         // e((f(8) + f(2))/10) = e(2/10)
  cplx beyond = omega_cs.at(11, 2, 8);       // p > x: e(2 c / 10)
  CHECK(std::abs(in_range - unit_phase(0.1)) < 1e-15);
  CHECK(std::abs(split - unit_phase(0.2)) < 1e-15);
  CHECK(std::abs(beyond - unit_phase(0.2)) < 1e-15);
}

TEST_CASE("main term reduces to x when the phase is trivial") {
  // a = b^m makes every coefficient 1, c' = 1, and all Euler factors cancel.
  auto pred = sd_main_term(additive_spec::big_omega(), 10, 1, base_b(10), {1000, 100000},
                           10000);
  CHECK(pred.c_prime == cplx{1.0, 0.0});
  for (size_t i = 0; i < pred.x_grid.size(); ++i) {
    CHECK(std::abs(pred.main_term[i] - cplx{static_cast<double>(pred.x_grid[i]), 0.0}) <=
          1e-10 * static_cast<double>(pred.x_grid[i]));
    CHECK(std::abs(pred.g_value[i] - 1.0) <= 1e-10);
  }
}

TEST_CASE("omega coefficient factors leave only k >= 2 corrections") {
  // For f = omega every a_p equals c', so each factor must equal
  // 1 + sum_{k>=2} (a_{p^k} - a_{p^(k-1)} a_p) / p^k with a_{p^k} = c'.
  auto om = additive_spec::little_omega();
  int64_t a = 1;
  int m = 1;
  base_b base(10);
  cplx cp = unit_phase(0.1);
  uint64_t x = 100000;
  for (uint64_t p : {2ull, 3ull, 5ull}) {
    cplx sum{0.0, 0.0};
    double pk_inv = 1.0;
    uint64_t pk = 1;
    bool below = true;
    for (unsigned k = 1; ; ++k) {
      if (below) {
        if (pk > x / p) below = false; else pk *= p;
      }
      pk_inv /= static_cast<double>(p);
      if (pk_inv < 1e-18) break;
      cplx coeff = below ? cp : cp * cp;  // omega: f(p^k) = 1; tail uses f(p^(k-1)) + f(p) = 2
      sum += coeff * pk_inv;
    }
    cplx factor = (1.0 + sum) * (1.0 - cp / static_cast<double>(p));
    cplx expect{1.0, 0.0};
    double q = 1.0 / static_cast<double>(p);
    double qk = q;  // q^k
    pk = 1; below = true;
    for (unsigned k = 2; ; ++k) {
      qk *= q;
      if (qk < 1e-18) break;
      // a_{p^k} switches from c' (inside x) to c'^2 (outside); a_{p^(k-1)} likewise.
      bool in_k = std::pow(static_cast<double>(p), static_cast<double>(k)) <= static_cast<double>(x);
      bool in_km1 = std::pow(static_cast<double>(p), static_cast<double>(k - 1)) <= static_cast<double>(x);
      cplx apk = in_k ? cp : cp * cp;
      cplx apk1 = in_km1 ? cp : cp * cp;
      expect += (apk - apk1 * cp) * qk;
    }
    CHECK(std::abs(factor - expect) < 1e-12);
    (void)a; (void)m; (void)base; (void)om;
  }
}

TEST_CASE("main term magnitude matches an independent high-precision route") {
  // One grid point of the omega prediction recomputed with long doubles and a
  // Spouge gamma; only |main|/x is compared.
  auto om = additive_spec::little_omega();
  uint64_t x = 100000, P = 100000;
  auto pred = sd_main_term(om, 1, 1, base_b(10), {x}, P);

  const long double two_pi = 2.0L * 3.14159265358979323846264338327950288L;
  std::complex<long double> cp{std::cos(two_pi * 0.1L), std::sin(two_pi * 0.1L)};
  std::complex<long double> g{1.0L, 0.0L};
  for (uint64_t p = 2; p <= P; ++p) {
    if (!oracle::is_prime(p)) continue;
    long double q = 1.0L / static_cast<long double>(p);
    g *= std::exp(cp * std::log1p(-q)) / (1.0L - cp * q);
    std::complex<long double> sum{0.0L, 0.0L};
    long double qk = 1.0L;
    uint64_t pk = 1;
    bool below = true;
    for (unsigned k = 1;; ++k) {
      if (below) { if (pk > x / p) below = false; else pk *= p; }
      qk *= q;
      if (qk < 1e-21L) break;
      sum += (below ? cp : cp * cp) * qk;
    }
    g *= (1.0L + sum) * (1.0L - cp * q);
  }
  long double loglog = std::log(std::log(static_cast<long double>(x)));
  std::complex<long double> main = static_cast<long double>(x) *
                                   std::exp((cp - 1.0L) * loglog) * g /
                                   oracle::spouge_gamma(cp);
  double want = static_cast<double>(std::abs(main)) / static_cast<double>(x);
  double got = std::abs(pred.main_term[0]) / static_cast<double>(x);
  CHECK(got == Approx(want).epsilon(1e-8));
}

TEST_CASE("phase prediction has modulus x and a first-order tail") {
  auto preds = phase_prediction(1.0, 7, 1, base_b(10), {10, 1000, 12345});
  std::vector<uint64_t> grid = {10, 1000, 12345};
  for (size_t i = 0; i < preds.size(); ++i)
    CHECK(std::abs(preds[i]) == Approx(static_cast<double>(grid[i])).epsilon(1e-12));

  // b^m >> log log x: prediction stays within 10 loglog(x)/b^m of x itself.
  uint64_t x = 1000000;
  auto tail = phase_prediction(1.0, 1, 30, base_b(2), {x});
  double loglog = std::log(std::log(static_cast<double>(x)));
  double bound = 10.0 * loglog / std::pow(2.0, 30);
  CHECK(std::abs(tail[0] - cplx{static_cast<double>(x), 0.0}) / static_cast<double>(x) <
        bound);
}

TEST_CASE("decay profile verdicts") {
  exp_sum_record flat;
  flat.x_grid = {10, 100, 1000};
  flat.sums = {cplx{10, 0}, cplx{100, 0}, cplx{1000, 0}};
  auto p1 = decay_profile(flat);
  CHECK(p1.verdict == "no-decay");
  CHECK(p1.ratio == std::vector<double>{1.0, 1.0, 1.0});

  exp_sum_record zeros;
  zeros.x_grid = {10, 100};
  zeros.sums = {cplx{0, 0}, cplx{0, 0}};
  CHECK(decay_profile(zeros).verdict == "zero");
  CHECK(decay_profile(zeros).ratio == std::vector<double>{0.0, 0.0});

  auto liouville = exp_sum(additive_spec::big_omega(), 1, 1, base_b(2),
                           {1000, 10000, 100000});
  auto prof = decay_profile(liouville);
  for (double r : prof.ratio) CHECK(r <= 0.1);
  CHECK(prof.verdict == "decay");
}

TEST_CASE("huge b^m falls back to the floating phase route") {
  // 10^40 does not fit in 64 bits; phases are then 1 + O(a f / b^m).
  auto om = additive_spec::little_omega();
  uint64_t x = 500;
  auto rec = exp_sum(om, 1, 40, base_b(10), {x});
  auto want = oracle::naive_exp_sum(om, 1, 40, 10, x);
  CHECK(std::abs(rec.sums[0] - want) < 1e-9);
  CHECK(std::abs(rec.sums[0] - cplx{static_cast<double>(x), 0.0}) < 1e-6);
}

TEST_CASE("exp_sum validates its inputs") {
  auto om = additive_spec::little_omega();
  CHECK_THROWS_AS(exp_sum(om, 0, 1, base_b(10), {10}), config_error);
  CHECK_THROWS_AS(exp_sum(om, 1, 0, base_b(10), {10}), config_error);
  CHECK_THROWS_AS(exp_sum(om, 1, 1, base_b(10), {}), config_error);
  CHECK_THROWS_AS(exp_sum(om, 1, 1, base_b(10), {10, 10}), config_error);
  CHECK_THROWS_AS(sd_main_term(om, 1, 1, base_b(10), {10}, 99), config_error);
  CHECK_THROWS_AS(sd_main_term(om, 1, 1, base_b(10), {2}, 1000), config_error);
}
