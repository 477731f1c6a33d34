#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "addigit/digits.hpp"
#include "addigit/errors.hpp"

namespace addigit {

// A fixed digit block a_1 a_2 ... a_k, most significant first.
struct block {
  int base;
  std::vector<uint8_t> digits;

  block(base_b b, std::vector<uint8_t> ds) : base(b.value), digits(std::move(ds)) {
    if (digits.empty()) throw config_error("block must have at least one digit");
    uint64_t v = 0;
    for (uint8_t d : digits) {
      if (static_cast<int>(d) >= base) throw config_error("block digit out of range for base");
      if (v > (UINT64_MAX - d) / static_cast<uint64_t>(base))
        throw config_error("block too long: value exceeds 64 bits");
      v = v * static_cast<uint64_t>(base) + d;
    }
  }
  static block parse(const std::string& text, base_b b) {
    std::vector<uint8_t> ds;
    for (char ch : text) {
      int d = char_digit(ch);
      if (d < 0) throw config_error(std::string("invalid block character '") + ch + "'");
      ds.push_back(static_cast<uint8_t>(d));
    }
    return block(b, std::move(ds));
  }

  int k() const { return static_cast<int>(digits.size()); }
  uint64_t index() const {
    uint64_t v = 0;
    for (uint8_t d : digits) v = v * static_cast<uint64_t>(base) + d;
    return v;
  }
  std::string text() const {
    std::string s;
    for (uint8_t d : digits) s.push_back(digit_char(d));
    return s;
  }
};

// Occurrence counts of every length-k block over a scanned digit stream.
// counts is indexed by the base-b value of the block.
struct block_census {
  int base = 0;
  int k = 0;
  std::vector<uint64_t> counts;
  uint64_t positions = 0;
};

namespace detail {

inline uint64_t census_table_size(int base, int k) {
  uint64_t size = 1;
  for (int i = 0; i < k; ++i) {
    if (size > (1ull << 26) / static_cast<uint64_t>(base))
      throw resource_error("census table b^k too large");
    size *= static_cast<uint64_t>(base);
  }
  return size;
}

}  // namespace detail

inline block_census make_census(base_b base, int k) {
  if (k < 1) throw config_error("census requires k >= 1");
  block_census c;
  c.base = base.value;
  c.k = k;
  c.counts.assign(detail::census_table_size(base.value, k), 0);
  return c;
}

// Counts every overlapping k-block of the stream (positions 1..L-k+1).
inline block_census census(std::span<const uint8_t> stream, int k, base_b base) {
  block_census c = make_census(base, k);
  if (stream.size() < static_cast<size_t>(k)) return c;
  const uint64_t mod = c.counts.size();
  const uint64_t b = static_cast<uint64_t>(base.value);
  uint64_t rolling = 0;
  for (size_t i = 0; i < stream.size(); ++i) {
    if (static_cast<int>(stream[i]) >= base.value)
      throw config_error("stream digit out of range for base");
    rolling = (rolling * b + stream[i]) % mod;
    if (i + 1 >= static_cast<size_t>(k)) ++c.counts[rolling];
  }
  c.positions = stream.size() - static_cast<size_t>(k) + 1;
  return c;
}

// Census of the concatenation of two streams, given their censuses and the
// seam digits: last k-1 digits of the first stream followed by the first k-1
// of the second.  Every block counted from `boundary` crosses the seam, so
// the merge is exact.
inline block_census merge(const block_census& c1, const block_census& c2,
                          std::span<const uint8_t> boundary) {
  if (c1.base != c2.base || c1.k != c2.k)
    throw config_error("census merge: base/k mismatch");
  if (boundary.size() > 2 * static_cast<size_t>(c1.k - 1))
    throw config_error("census merge: boundary longer than 2(k-1)");
  block_census out = c1;
  for (size_t i = 0; i < c2.counts.size(); ++i) out.counts[i] += c2.counts[i];
  out.positions += c2.positions;
  if (c1.k > 1 && boundary.size() >= static_cast<size_t>(c1.k)) {
    block_census seam = census(boundary, c1.k, base_b(c1.base));
    for (size_t i = 0; i < seam.counts.size(); ++i) out.counts[i] += seam.counts[i];
    out.positions += seam.positions;
  }
  return out;
}

// Incremental census over a stream delivered in chunks.
class census_accumulator {
 public:
  census_accumulator(base_b base, int k) : total_(make_census(base, k)) {}

  void append(std::span<const uint8_t> chunk) {
    if (chunk.empty()) return;
    block_census part = census(chunk, total_.k, base_b(total_.base));
    size_t keep = static_cast<size_t>(total_.k - 1);
    std::vector<uint8_t> boundary = tail_;
    boundary.insert(boundary.end(), chunk.begin(),
                    chunk.begin() + static_cast<ptrdiff_t>(std::min(chunk.size(), keep)));
    total_ = merge(total_, part, boundary);
    if (chunk.size() >= keep) {
      tail_.assign(chunk.end() - static_cast<ptrdiff_t>(keep), chunk.end());
    } else {
      tail_.insert(tail_.end(), chunk.begin(), chunk.end());
      if (tail_.size() > keep) tail_.erase(tail_.begin(), tail_.end() - static_cast<ptrdiff_t>(keep));
    }
  }

  const block_census& result() const { return total_; }

 private:
  block_census total_;
  std::vector<uint8_t> tail_;
};

// Census of the concatenated digit stream for n = 1..n_max without ever
// materializing it: segments are sieved (possibly concurrently), censused on
// the fly, and folded in index order with exact seam handling.
inline block_census census_stream(const additive_spec& spec, const length_schedule& sched,
                                  int k, uint64_t n_max, const run_options& opts = {}) {
  if (n_max < 1) throw config_error("census_stream requires n_max >= 1");
  struct seg_part {
    block_census cens;
    std::vector<uint8_t> head, tail;  // first / last min(k-1, len) digits
  };
  const size_t n_segs = segment_count(1, n_max + 1, opts.segment_len);
  {
    uint64_t table = detail::census_table_size(sched.base.value, k);
    if (table * n_segs > (1ull << 27))
      throw resource_error("census_stream: per-segment tables exceed budget; raise segment_len");
  }
  std::vector<seg_part> parts(n_segs);
  const size_t keep = static_cast<size_t>(k - 1);
  detail::produce_stream(spec, 1, n_max + 1, opts, opts.threads,
      [&](size_t idx, uint64_t seg_lo, std::span<const uint64_t> vi, std::span<const double> vd) {
        thread_local std::vector<uint8_t> chunk;
        chunk.clear();
        size_t len = vi.empty() ? vd.size() : vi.size();
        for (size_t i = 0; i < len; ++i) {
          uint64_t n = seg_lo + i;
          uint64_t v = vi.empty() ? floor_to_u64(std::floor(vd[i])) : vi[i];
          detail::append_truncated(chunk, v, sched.length_at(static_cast<double>(n)),
                                   sched.base.value);
        }
        seg_part& part = parts[idx];
        part.cens = census(chunk, k, sched.base);
        size_t head_len = std::min(chunk.size(), keep);
        part.head.assign(chunk.begin(), chunk.begin() + static_cast<ptrdiff_t>(head_len));
        part.tail.assign(chunk.end() - static_cast<ptrdiff_t>(head_len), chunk.end());
      });
  block_census total = make_census(sched.base, k);
  std::vector<uint8_t> tail;
  for (const seg_part& part : parts) {
    std::vector<uint8_t> boundary = tail;
    boundary.insert(boundary.end(), part.head.begin(), part.head.end());
    total = merge(total, part.cens, boundary);
    tail.insert(tail.end(), part.tail.begin(), part.tail.end());
    if (tail.size() > keep) tail.erase(tail.begin(), tail.end() - static_cast<ptrdiff_t>(keep));
  }
  return total;
}

// Pearson statistic against the uniform expectation positions / b^k.
inline double chi_square(const block_census& c) {
  if (c.positions == 0) throw config_error("chi_square of an empty census");
  double expected = static_cast<double>(c.positions) / static_cast<double>(c.counts.size());
  double chi = 0.0;
  for (uint64_t count : c.counts) {
    double d = static_cast<double>(count) - expected;
    chi += d * d / expected;
  }
  return chi;
}

// Indicator of the fractional part of z lying in [0.a_1...a_k, +b^-k).
inline int theta_ind(double z, const block& blk) {
  double frac = z - std::floor(z);
  double bk = std::pow(static_cast<double>(blk.base), -blk.k());
  double lo = static_cast<double>(blk.index()) * bk;
  return (frac >= lo && frac < lo + bk) ? 1 : 0;
}

// Exact integer route: 1 iff digits m, m-1, ..., m-k+1 of v match the block.
// Equivalent to theta_ind(v / b^m, blk) without floating comparisons.
inline int theta_ind_floor(uint64_t v, int m, const block& blk) {
  if (m < 1) throw config_error("theta_ind_floor requires m >= 1");
  const uint64_t b = static_cast<uint64_t>(blk.base);
  const int k = blk.k();
  // r = v mod b^m without materializing b^m (which may overflow).
  uint64_t r = v;
  {
    uint64_t bm = 1;
    bool overflow = false;
    for (int i = 0; i < m; ++i) {
      if (bm > UINT64_MAX / b) { overflow = true; break; }
      bm *= b;
    }
    if (!overflow) r = v % bm;
  }
  if (m >= k) {
    for (int i = 0; i < m - k; ++i) r /= b;
    uint64_t bk = 1;
    for (int i = 0; i < k; ++i) {
      if (bk > UINT64_MAX / b) return 0;  // block wider than any 64-bit value
      bk *= b;
    }
    return (r % bk) == blk.index() ? 1 : 0;
  }
  // m < k: positions below 1 read as zeros, so the scaled comparison
  // r * b^(k-m) == index must hold exactly.
  uint64_t scaled = r;
  for (int i = 0; i < k - m; ++i) {
    if (scaled > UINT64_MAX / b) return 0;
    scaled *= b;
  }
  return scaled == blk.index() ? 1 : 0;
}

// Block occurrence accounting over the stream of x concatenated strings:
// n_formula is the indicator double sum over (n, m); n_star is the raw count
// over the whole stream including seam-crossing matches.  u_part / v_part
// restrict m to the low and high windows cut at eps, clipped to each string's
// own [k, length(n)] range so they stay sub-sums of n_formula.
struct count_report {
  uint64_t x = 0;
  double y = 0.5;
  double eps = 0.1;
  int base = 10;
  std::string block_text;
  bool synthetic = false;
  uint64_t n_star = 0;
  uint64_t n_formula = 0;
  uint64_t u_part = 0;
  uint64_t v_part = 0;
  uint64_t boundary_occurrences = 0;  // n_star - (in-string matches)
};

inline count_report count_formula(const additive_spec& spec, const length_schedule& sched,
                                  const block& blk, uint64_t x, double eps = 0.1,
                                  const run_options& opts = {}) {
  if (x < 1) throw config_error("count_formula requires x >= 1");
  if (blk.base != sched.base.value) throw config_error("block base differs from schedule base");
  if (!(eps > 0.0 && eps < 1.0)) throw config_error("count_formula eps must be in (0, 1)");
  const int k = blk.k();
  if (k > sched.length_at(1.0))
    throw config_error("block longer than the shortest string in the stream");

  count_report rep;
  rep.x = x;
  rep.y = sched.y;
  rep.eps = eps;
  rep.base = blk.base;
  rep.block_text = blk.text();
  rep.synthetic = sched.synthetic();

  const int k_half_x = sched.half().length_at(static_cast<double>(x));
  const int k_cap_x = sched.y > 0.5 ? k_half_x : sched.length_at(static_cast<double>(x));
  const int u_lo = static_cast<int>(std::ceil(eps * k_half_x));
  const int u_hi = static_cast<int>(std::floor((1.0 - eps) * k_cap_x));
  const int v_lo = static_cast<int>(std::ceil((1.0 + eps) * k_cap_x));
  const int v_hi = sched.length_at(static_cast<double>(x));

  const uint64_t b = static_cast<uint64_t>(blk.base);
  uint64_t block_mod = 1;
  for (int i = 0; i < k; ++i) block_mod *= b;  // block ctor guarantees no overflow
  const uint64_t target = blk.index();

  uint64_t in_string = 0;
  uint64_t rolling = 0;
  uint64_t digits_seen = 0;
  uint64_t string_start = 1;  // global 1-based position of the current string

  std::vector<uint8_t> buf;
  detail::produce_stream(spec, 1, x + 1, opts, /*threads=*/1,
      [&](size_t, uint64_t seg_lo, std::span<const uint64_t> vi, std::span<const double> vd) {
        size_t len = vi.empty() ? vd.size() : vi.size();
        for (size_t i = 0; i < len; ++i) {
          uint64_t n = seg_lo + i;
          int len_n = sched.length_at(static_cast<double>(n));
          uint64_t v = spec.integer_valued() ? vi[i] : floor_to_u64(std::floor(vd[i]));
          for (int m = k; m <= len_n; ++m) {
            int hit = theta_ind_floor(v, m, blk);
            rep.n_formula += hit;
            if (hit) {
              if (m >= std::max(u_lo, k) && m <= std::min(u_hi, len_n)) ++rep.u_part;
              if (m >= std::max(v_lo, k) && m <= std::min(v_hi, len_n)) ++rep.v_part;
            }
          }
          buf.clear();
          detail::append_truncated(buf, v, len_n, blk.base);
          string_start = digits_seen + 1;
          for (uint8_t d : buf) {
            rolling = (rolling * b + d) % block_mod;
            ++digits_seen;
            if (digits_seen >= static_cast<uint64_t>(k) && rolling == target) {
              ++rep.n_star;
              if (digits_seen - k + 1 >= string_start) ++in_string;
            }
          }
        }
      });
  rep.boundary_occurrences = rep.n_star - in_string;
  return rep;
}

}  // namespace addigit
