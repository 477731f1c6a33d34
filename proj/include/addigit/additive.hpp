#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "addigit/errors.hpp"
#include "addigit/factor.hpp"
#include "addigit/primes.hpp"

namespace addigit {

enum class additivity {
  completely_additive,   // f(p^k) = k f(p)
  strongly_additive,     // f(p^k) = f(p)
  table_with_default,    // per prime-power overrides, completely-additive fill
};

enum class value_kind {
  exact_integer,  // all prime-power values are non-negative 64-bit integers
  real_valued,    // binary64 values
};

inline const char* to_string(additivity m) {
  switch (m) {
    case additivity::completely_additive: return "completely-additive";
    case additivity::strongly_additive: return "strongly-additive";
    case additivity::table_with_default: return "table-with-default";
  }
  return "?";
}

inline const char* to_string(value_kind k) {
  return k == value_kind::exact_integer ? "exact-integer" : "real";
}

// A non-negative additive function, defined by its values on prime powers:
// f(p) comes from an explicit per-prime rule falling back to the constant c,
// and f(p^k) follows the additivity mode (table mode first consults the
// (p, k) override table).  f(1) = 0 and f(mn) = f(m) + f(n) for coprime m, n.
class additive_spec {
 public:
  additive_spec(additivity mode, value_kind kind, double c,
                std::map<uint64_t, double> prime_rule = {},
                std::map<std::pair<uint64_t, unsigned>, double> overrides = {},
                std::string name = "custom", bool c_estimated = false)
      : mode_(mode), kind_(kind), c_(c), prime_rule_(std::move(prime_rule)),
        overrides_(std::move(overrides)), name_(std::move(name)),
        c_estimated_(c_estimated) {
    validate();
  }

  // Number of prime factors with multiplicity.
  static additive_spec big_omega() {
    return additive_spec(additivity::completely_additive, value_kind::exact_integer,
                         1.0, {}, {}, "Omega");
  }
  // Number of distinct prime factors.
  static additive_spec little_omega() {
    return additive_spec(additivity::strongly_additive, value_kind::exact_integer,
                         1.0, {}, {}, "omega");
  }

  additivity mode() const { return mode_; }
  value_kind kind() const { return kind_; }
  bool integer_valued() const { return kind_ == value_kind::exact_integer; }
  double prime_constant() const { return c_; }
  bool c_estimated() const { return c_estimated_; }
  const std::string& name() const { return name_; }

  double prime_value(uint64_t p) const {
    auto it = prime_rule_.find(p);
    return it != prime_rule_.end() ? it->second : c_;
  }

  // f(p^k) as binary64.
  double value(uint64_t p, unsigned k) const {
    if (k == 0) return 0.0;
    if (mode_ == additivity::table_with_default) {
      auto it = overrides_.find({p, k});
      if (it != overrides_.end()) return it->second;
    }
    switch (mode_) {
      case additivity::strongly_additive: return prime_value(p);
      case additivity::completely_additive:
      case additivity::table_with_default: return static_cast<double>(k) * prime_value(p);
    }
    return 0.0;
  }

  // f(p^k) in exact 64-bit arithmetic; only valid for exact-integer specs.
  uint64_t value_u64(uint64_t p, unsigned k) const {
    if (k == 0) return 0;
    if (mode_ == additivity::table_with_default) {
      auto it = overrides_.find({p, k});
      if (it != overrides_.end()) return static_cast<uint64_t>(it->second);
    }
    uint64_t fp = static_cast<uint64_t>(prime_value(p));
    if (mode_ == additivity::strongly_additive) return fp;
    if (fp != 0 && k > UINT64_MAX / fp)
      throw numeric_error("additive value overflows 64 bits at p^k");
    return static_cast<uint64_t>(k) * fp;
  }

  const std::map<uint64_t, double>& prime_rule() const { return prime_rule_; }
  const std::map<std::pair<uint64_t, unsigned>, double>& overrides() const { return overrides_; }

  // Round-trippable key=value form (the same syntax parse_config accepts).
  std::string config_string() const {
    std::ostringstream os;
    os << "mode = " << to_string(mode_) << "\n";
    os << "value_kind = " << to_string(kind_) << "\n";
    os << "c = " << format_value(c_) << (c_estimated_ ? "   # estimated (median of listed f(p), p <= 1e5)" : "") << "\n";
    for (const auto& [p, v] : prime_rule_) os << p << " = " << format_value(v) << "\n";
    for (const auto& [pk, v] : overrides_)
      os << pk.first << "^" << pk.second << " = " << format_value(v) << "\n";
    return os.str();
  }

  // Parses the plain-text config:
  //   mode = completely-additive | strongly-additive | table-with-default
  //   value_kind = exact-integer | real        (optional; inferred if absent)
  //   c = <non-negative>                       (optional if prime rules given)
  //   <p> = <value>                            per-prime value, p prime
  //   <p>^<k> = <value>                        prime-power override (table mode)
  // '#' starts a comment; unknown keys are errors.
  static additive_spec parse_config(std::istream& in, const std::string& name = "custom") {
    std::optional<additivity> mode;
    std::optional<value_kind> kind;
    std::optional<double> c;
    std::map<uint64_t, double> rule;
    std::map<std::pair<uint64_t, unsigned>, double> overrides;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::string key = trim(line.substr(0, line.find('=')));
      if (key.empty()) {
        if (!trim(line).empty())
          throw config_error(name + ":" + std::to_string(lineno) + ": expected key = value");
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw config_error(name + ":" + std::to_string(lineno) + ": expected key = value");
      std::string val = trim(line.substr(eq + 1));
      if (key == "mode") {
        if (val == "completely-additive") mode = additivity::completely_additive;
        else if (val == "strongly-additive") mode = additivity::strongly_additive;
        else if (val == "table-with-default") mode = additivity::table_with_default;
        else throw config_error(name + ": unknown mode '" + val + "'");
      } else if (key == "value_kind") {
        if (val == "exact-integer") kind = value_kind::exact_integer;
        else if (val == "real") kind = value_kind::real_valued;
        else throw config_error(name + ": unknown value_kind '" + val + "'");
      } else if (key == "c") {
        c = parse_number(val, name, "c");
      } else if (is_count(key)) {
        uint64_t p = parse_u64(key, name, key);
        if (!is_prime_u64(p)) throw config_error(name + ": key " + key + " is not prime");
        rule[p] = parse_number(val, name, key);
      } else if (auto caret = key.find('^'); caret != std::string::npos &&
                 is_count(trim(key.substr(0, caret))) && is_count(trim(key.substr(caret + 1)))) {
        uint64_t p = parse_u64(trim(key.substr(0, caret)), name, key);
        uint64_t k64 = parse_u64(trim(key.substr(caret + 1)), name, key);
        if (!is_prime_u64(p)) throw config_error(name + ": base of " + key + " is not prime");
        if (k64 < 1 || k64 > 64) throw config_error(name + ": exponent in " + key + " must be in [1, 64]");
        overrides[{p, static_cast<unsigned>(k64)}] = parse_number(val, name, key);
      } else {
        throw config_error(name + ": unknown key '" + key + "'");
      }
    }

    if (!overrides.empty() && mode && *mode != additivity::table_with_default)
      throw config_error(name + ": p^k overrides require mode = table-with-default");
    if (!mode) mode = overrides.empty() ? additivity::completely_additive
                                        : additivity::table_with_default;

    bool estimated = false;
    if (!c) {
      // No constant given: fall back to the median of the listed prime values
      // up to 1e5 and flag the estimate in every echo of the config.
      std::vector<double> vals;
      for (const auto& [p, v] : rule)
        if (p <= 100000) vals.push_back(v);
      if (vals.empty())
        throw config_error(name + ": c missing and no prime rule below 1e5 to estimate it from");
      std::sort(vals.begin(), vals.end());
      size_t n = vals.size();
      c = n % 2 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
      estimated = true;
    }

    if (!kind) {
      bool all_int = is_exact_int(*c);
      for (const auto& [p, v] : rule) all_int = all_int && is_exact_int(v);
      for (const auto& [pk, v] : overrides) all_int = all_int && is_exact_int(v);
      kind = all_int ? value_kind::exact_integer : value_kind::real_valued;
    }

    return additive_spec(*mode, *kind, *c, std::move(rule), std::move(overrides),
                         name, estimated);
  }

 private:
  static std::string trim(std::string s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  }
  static bool is_count(const std::string& s) {
    if (s.empty()) return false;
    for (char ch : s)
      if (ch < '0' || ch > '9') return false;
    return true;
  }
  static double parse_number(const std::string& s, const std::string& name, const std::string& key) {
    try {
      size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw config_error(name + ": bad numeric value for '" + key + "': " + s);
    }
  }
  static uint64_t parse_u64(const std::string& s, const std::string& name, const std::string& key) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw config_error(name + ": number out of range in key '" + key + "'");
    }
  }
  static bool is_exact_int(double v) {
    return std::floor(v) == v && std::abs(v) < 9.007199254740992e15;  // 2^53
  }
  static std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  void validate() const {
    if (c_ < 0) throw config_error(name_ + ": constant c must be non-negative");
    for (const auto& [p, v] : prime_rule_) {
      if (v < 0) throw config_error(name_ + ": negative value at prime " + std::to_string(p));
      if (integer_valued() && !is_exact_int(v))
        throw config_error(name_ + ": exact-integer spec has non-integer value at " + std::to_string(p));
    }
    for (const auto& [pk, v] : overrides_) {
      if (v < 0) throw config_error(name_ + ": negative value at override");
      if (integer_valued() && !is_exact_int(v))
        throw config_error(name_ + ": exact-integer spec has non-integer override value");
    }
    if (integer_valued() && !is_exact_int(c_))
      throw config_error(name_ + ": exact-integer spec has non-integer c");
    if (!overrides_.empty() && mode_ != additivity::table_with_default)
      throw config_error(name_ + ": p^k overrides require mode = table-with-default");
  }

  additivity mode_;
  value_kind kind_;
  double c_;
  std::map<uint64_t, double> prime_rule_;
  std::map<std::pair<uint64_t, unsigned>, double> overrides_;
  std::string name_;
  bool c_estimated_ = false;
};

// f(n) by direct factorization.  Total for any 64-bit n >= 1.
inline double evaluate(const additive_spec& spec, uint64_t n) {
  double sum = 0.0;
  for (auto [p, k] : factorize_u64(n)) sum += spec.value(p, static_cast<unsigned>(k));
  return sum;
}

// Exact-integer variant of evaluate().
inline uint64_t evaluate_u64(const additive_spec& spec, uint64_t n) {
  uint64_t sum = 0;
  for (auto [p, k] : factorize_u64(n)) sum += spec.value_u64(p, static_cast<unsigned>(k));
  return sum;
}

}  // namespace addigit
