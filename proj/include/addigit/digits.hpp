#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "addigit/additive.hpp"
#include "addigit/errors.hpp"
#include "addigit/sieve.hpp"

namespace addigit {

struct base_b {
  int value;
  explicit base_b(int b) : value(b) {
    if (b < 2 || b > 36) throw config_error("base must be in [2, 36]");
  }
};

inline char digit_char(int d) { return d < 10 ? char('0' + d) : char('a' + d - 10); }

inline int char_digit(char ch) {
  if (ch >= '0' && ch <= '9') return ch - '0';
  if (ch >= 'a' && ch <= 'z') return ch - 'a' + 10;
  if (ch >= 'A' && ch <= 'Z') return ch - 'A' + 10;
  return -1;
}

// Fixed-length digit string, most significant digit first.
struct digit_string {
  int base = 10;
  std::vector<uint8_t> digits;

  std::string text() const {
    std::string s;
    s.reserve(digits.size());
    for (uint8_t d : digits) s.push_back(digit_char(d));
    return s;
  }

  // Numeric value; requires it to fit in 64 bits.
  uint64_t value_u64() const {
    uint64_t v = 0;
    for (uint8_t d : digits) {
      if (v > (UINT64_MAX - d) / static_cast<uint64_t>(base))
        throw numeric_error("digit string value exceeds 64 bits");
      v = v * static_cast<uint64_t>(base) + d;
    }
    return v;
  }
};

inline uint64_t floor_to_u64(double z) {
  if (!(z >= 0.0)) throw numeric_error("digit extraction requires z >= 0");
  if (z >= 9.223372036854775808e18) throw numeric_error("floor(z) exceeds 64 bits");
  return static_cast<uint64_t>(z);
}

// Digit at `position` (least significant digit = position 1) of floor(z).
inline int digit_of(uint64_t v, int position, base_b base) {
  if (position < 1) throw config_error("digit position must be >= 1");
  for (int i = 1; i < position && v != 0; ++i) v /= static_cast<uint64_t>(base.value);
  return static_cast<int>(v % static_cast<uint64_t>(base.value));
}

inline int digit_of(double z, int position, base_b base) {
  return digit_of(floor_to_u64(z), position, base);
}

// Last m base-b digits of floor(z), zero-padded on the left to exactly m.
inline digit_string truncate_digits(uint64_t v, int m, base_b base) {
  if (m < 1) throw config_error("truncation length must be >= 1");
  digit_string out;
  out.base = base.value;
  out.digits.assign(static_cast<size_t>(m), 0);
  for (int i = m - 1; i >= 0 && v != 0; --i) {
    out.digits[static_cast<size_t>(i)] = static_cast<uint8_t>(v % base.value);
    v /= static_cast<uint64_t>(base.value);
  }
  return out;
}

inline digit_string truncate_digits(double z, int m, base_b base) {
  return truncate_digits(floor_to_u64(z), m, base);
}

// Truncation length schedule: ceil(y * ln ln ln x / ln b) digits for x beyond
// e^e, one digit otherwise.  forced_len overrides the formula outright; the
// triple log keeps the natural schedule at 1-2 digits for any feasible x, so
// wide-window experiments have to force larger values (and outputs are marked
// synthetic when they do).
struct length_schedule {
  double y = 0.5;
  base_b base{10};
  std::optional<uint32_t> forced_len;

  length_schedule(double y_, base_b base_, std::optional<uint32_t> forced = std::nullopt)
      : y(y_), base(base_), forced_len(forced) {
    if (!(y > 0)) throw config_error("length schedule requires y > 0");
    if (forced_len && *forced_len < 1) throw config_error("forced length must be >= 1");
  }

  bool synthetic() const { return forced_len.has_value(); }

  int length_at(double x) const {
    if (forced_len) return static_cast<int>(*forced_len);
    static const double e_to_e = std::exp(std::exp(1.0));
    if (!(x > e_to_e)) return 1;
    double l = std::ceil(y * std::log(std::log(std::log(x))) / std::log(double(base.value)));
    return l < 1.0 ? 1 : static_cast<int>(l);
  }

  // The canonical half-rate schedule backing the windowed truncation.  A
  // forced length is rescaled by new_y/y so synthetic runs keep the natural
  // proportionality length_at(x) ~ (y / new_y) * with_rate(new_y).length_at(x).
  length_schedule with_rate(double new_y) const {
    std::optional<uint32_t> forced;
    if (forced_len)
      forced = static_cast<uint32_t>(std::max(1.0, std::ceil(*forced_len * new_y / y)));
    return length_schedule(new_y, base, forced);
  }
  length_schedule half() const { return with_rate(0.5); }
};

// Total digits of the concatenated stream for n = 1..n_max.
inline uint64_t stream_length(const length_schedule& sched, uint64_t n_max) {
  uint64_t total = 0;
  uint64_t n = 1;
  while (n <= n_max) {
    int len = sched.length_at(static_cast<double>(n));
    // Lengths are non-decreasing; binary search the end of this plateau.
    uint64_t lo = n, hi = n_max;
    while (lo < hi) {
      uint64_t mid = lo + (hi - lo + 1) / 2;
      if (sched.length_at(static_cast<double>(mid)) == len) lo = mid; else hi = mid - 1;
    }
    total += (lo - n + 1) * static_cast<uint64_t>(len);
    n = lo + 1;
  }
  return total;
}

namespace detail {

inline uint64_t floored_value(const additive_spec& spec, uint64_t vi, double vd) {
  return spec.integer_valued() ? vi : floor_to_u64(std::floor(vd));
}

// Emits the truncated digits of v (length m, MSD first) into out.
inline void append_truncated(std::vector<uint8_t>& out, uint64_t v, int m, int base) {
  size_t at = out.size();
  out.resize(at + static_cast<size_t>(m), 0);
  for (int i = m - 1; i >= 0 && v != 0; --i) {
    out[at + static_cast<size_t>(i)] = static_cast<uint8_t>(v % static_cast<uint64_t>(base));
    v /= static_cast<uint64_t>(base);
  }
}

template <typename Emit>
void produce_stream(const additive_spec& spec, uint64_t n_lo, uint64_t n_hi,
                    const run_options& opts, int threads_override, Emit&& emit) {
  run_options o = opts;
  if (threads_override >= 0) o.threads = threads_override;
  if (spec.integer_valued()) {
    for_each_factored_segment<uint64_t>(spec, n_lo, n_hi, o,
        [&](size_t idx, uint64_t seg_lo, std::span<const uint64_t> vals) {
          emit(idx, seg_lo, vals, std::span<const double>());
        });
  } else {
    for_each_factored_segment<double>(spec, n_lo, n_hi, o,
        [&](size_t idx, uint64_t seg_lo, std::span<const double> vals) {
          emit(idx, seg_lo, std::span<const uint64_t>(), vals);
        });
  }
}

}  // namespace detail

// The concatenation (f_y(1))(f_y(2))...(f_y(n_max)) where f_y(n) keeps the
// last length_at(n) digits of floor(f(n)).
inline std::vector<uint8_t> build_stream(const additive_spec& spec,
                                         const length_schedule& sched,
                                         uint64_t n_max, const run_options& opts = {}) {
  if (n_max < 1) throw config_error("build_stream requires n_max >= 1");
  uint64_t total = stream_length(sched, n_max);
  if (total > opts.memory_budget)
    throw resource_error("build_stream: stream length exceeds memory budget");
  std::vector<uint8_t> out;
  out.reserve(total);
  detail::produce_stream(spec, 1, n_max + 1, opts, /*threads=*/1,
      [&](size_t, uint64_t seg_lo, std::span<const uint64_t> vi, std::span<const double> vd) {
        size_t len = vi.empty() ? vd.size() : vi.size();
        for (size_t i = 0; i < len; ++i) {
          uint64_t n = seg_lo + i;
          uint64_t v = spec.integer_valued() ? vi[i] : floor_to_u64(std::floor(vd[i]));
          detail::append_truncated(out, v, sched.length_at(static_cast<double>(n)),
                                   sched.base.value);
        }
      });
  return out;
}

// Windowed variant: for each n keep the digits of floor(f(n)) from position
// ceil((1-eps)*L(n)) down to max(ceil(eps*L(n)), 1), where L is the canonical
// half-rate length.  An inverted window (possible for eps > 1/2) emits nothing.
inline std::vector<uint8_t> build_window_stream(const additive_spec& spec, double eps,
                                                const length_schedule& half_sched,
                                                uint64_t n_max, const run_options& opts = {}) {
  if (!(eps > 0.0 && eps < 1.0)) throw config_error("window eps must be in (0, 1)");
  if (n_max < 1) throw config_error("build_window_stream requires n_max >= 1");
  std::vector<uint8_t> out;
  detail::produce_stream(spec, 1, n_max + 1, opts, /*threads=*/1,
      [&](size_t, uint64_t seg_lo, std::span<const uint64_t> vi, std::span<const double> vd) {
        size_t len = vi.empty() ? vd.size() : vi.size();
        for (size_t i = 0; i < len; ++i) {
          uint64_t n = seg_lo + i;
          int L = half_sched.length_at(static_cast<double>(n));
          int hi_pos = static_cast<int>(std::ceil((1.0 - eps) * L));
          int lo_pos = std::max(static_cast<int>(std::ceil(eps * L)), 1);
          if (out.size() + static_cast<size_t>(std::max(0, hi_pos - lo_pos + 1)) > opts.memory_budget)
            throw resource_error("build_window_stream: stream exceeds memory budget");
          uint64_t v = spec.integer_valued() ? vi[i] : floor_to_u64(std::floor(vd[i]));
          for (int pos = hi_pos; pos >= lo_pos; --pos)
            out.push_back(static_cast<uint8_t>(digit_of(v, pos, half_sched.base)));
        }
      });
  return out;
}

// ---- stream serialization ----------------------------------------------
//
// Text form: one character per digit (0-9a-z), '#' lines are comments.
// Binary form: 8-byte header {'T','D', flags, base, length:u32le}, then one
// byte per digit.  flags bit 0 marks a synthetic (forced) length schedule.

inline void write_stream_text(std::ostream& os, std::span<const uint8_t> digits) {
  std::string line;
  line.reserve(digits.size());
  for (uint8_t d : digits) line.push_back(digit_char(d));
  os << line << "\n";
}

inline constexpr char stream_magic[2] = {'T', 'D'};

inline void write_stream_binary(std::ostream& os, std::span<const uint8_t> digits,
                                base_b base, bool synthetic) {
  if (digits.size() > UINT32_MAX) throw resource_error("binary stream longer than 2^32-1 digits");
  uint32_t len = static_cast<uint32_t>(digits.size());
  char header[8] = {stream_magic[0], stream_magic[1],
                    static_cast<char>(synthetic ? 1 : 0),
                    static_cast<char>(base.value),
                    static_cast<char>(len & 0xff), static_cast<char>((len >> 8) & 0xff),
                    static_cast<char>((len >> 16) & 0xff), static_cast<char>((len >> 24) & 0xff)};
  os.write(header, 8);
  os.write(reinterpret_cast<const char*>(digits.data()),
           static_cast<std::streamsize>(digits.size()));
}

struct stream_file {
  std::vector<uint8_t> digits;
  std::optional<int> base;  // known only for binary files
  bool synthetic = false;
};

inline stream_file read_stream(std::istream& is) {
  stream_file out;
  int c0 = is.peek();
  if (c0 == stream_magic[0]) {
    char header[8];
    is.read(header, 8);
    if (is.gcount() == 8 && header[0] == stream_magic[0] && header[1] == stream_magic[1]) {
      out.synthetic = header[2] & 1;
      out.base = static_cast<unsigned char>(header[3]);
      uint32_t len = static_cast<uint8_t>(header[4]) | (static_cast<uint8_t>(header[5]) << 8) |
                     (static_cast<uint8_t>(header[6]) << 16) |
                     (static_cast<uint32_t>(static_cast<uint8_t>(header[7])) << 24);
      out.digits.resize(len);
      is.read(reinterpret_cast<char*>(out.digits.data()), len);
      if (static_cast<uint32_t>(is.gcount()) != len)
        throw config_error("binary stream file truncated");
      return out;
    }
    throw config_error("bad binary stream header");
  }
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] == '#') continue;
    for (char ch : line) {
      if (ch == ' ' || ch == '\t' || ch == '\r') continue;
      int d = char_digit(ch);
      if (d < 0) throw config_error(std::string("invalid digit character '") + ch + "' in stream");
      out.digits.push_back(static_cast<uint8_t>(d));
    }
  }
  return out;
}

}  // namespace addigit
