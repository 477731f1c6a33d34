#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "addigit/blocks.hpp"
#include "addigit/classify.hpp"
#include "addigit/expsum.hpp"
#include "addigit/sieve.hpp"

namespace addigit {

// Round-trippable double formatting; keeps CSV output byte-stable.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// '#'-prefixed header block echoing the resolved run configuration.
struct config_echo {
  std::vector<std::pair<std::string, std::string>> items;

  void add(std::string key, std::string value) {
    items.emplace_back(std::move(key), std::move(value));
  }
  void add(std::string key, uint64_t value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, int64_t value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, int value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, double value) { add(std::move(key), fmt_double(value)); }

  void write(std::ostream& os) const {
    for (const auto& [k, v] : items) os << "# " << k << " = " << v << "\n";
  }
};

inline void write_values_csv(std::ostream& os, const config_echo& echo, uint64_t lo,
                             const std::vector<uint64_t>& values) {
  echo.write(os);
  os << "n,value\n";
  for (size_t i = 0; i < values.size(); ++i)
    os << lo + i << "," << values[i] << "\n";
}

inline void write_values_csv(std::ostream& os, const config_echo& echo, uint64_t lo,
                             const std::vector<double>& values) {
  echo.write(os);
  os << "n,value\n";
  for (size_t i = 0; i < values.size(); ++i)
    os << lo + i << "," << fmt_double(values[i]) << "\n";
}

inline void write_census_csv(std::ostream& os, const config_echo& echo, const block_census& c) {
  echo.write(os);
  os << "block,count,frequency\n";
  std::vector<uint8_t> digits(static_cast<size_t>(c.k), 0);
  for (size_t idx = 0; idx < c.counts.size(); ++idx) {
    uint64_t v = idx;
    for (int d = c.k - 1; d >= 0; --d) {
      digits[static_cast<size_t>(d)] = static_cast<uint8_t>(v % c.base);
      v /= static_cast<uint64_t>(c.base);
    }
    std::string text;
    for (uint8_t d : digits) text.push_back(digit_char(d));
    double freq = c.positions ? static_cast<double>(c.counts[idx]) / static_cast<double>(c.positions) : 0.0;
    os << text << "," << c.counts[idx] << "," << fmt_double(freq) << "\n";
  }
  os << "TOTAL," << c.positions << ","
     << fmt_double(c.positions ? chi_square(c) : 0.0) << "\n";
}

inline void write_count_csv(std::ostream& os, const config_echo& echo, const count_report& r) {
  echo.write(os);
  os << "x,n_star,n_formula,u_part,v_part,boundary_occurrences\n";
  os << r.x << "," << r.n_star << "," << r.n_formula << "," << r.u_part << "," << r.v_part
     << "," << r.boundary_occurrences << "\n";
}

inline void write_expsum_csv(std::ostream& os, const config_echo& echo,
                             const exp_sum_record& rec, const sd_prediction& pred) {
  echo.write(os);
  os << "x,S_re,S_im,S_abs,S_abs_over_x,pred_re,pred_im,pred_abs,ratio_abs\n";
  for (size_t i = 0; i < rec.x_grid.size(); ++i) {
    double x = static_cast<double>(rec.x_grid[i]);
    double s_abs = std::abs(rec.sums[i]);
    double p_abs = std::abs(pred.main_term[i]);
    os << rec.x_grid[i] << "," << fmt_double(rec.sums[i].real()) << ","
       << fmt_double(rec.sums[i].imag()) << "," << fmt_double(s_abs) << ","
       << fmt_double(s_abs / x) << "," << fmt_double(pred.main_term[i].real()) << ","
       << fmt_double(pred.main_term[i].imag()) << "," << fmt_double(p_abs) << ","
       << fmt_double(p_abs > 0.0 ? s_abs / p_abs : 0.0) << "\n";
  }
}

inline void write_classifier_csv(std::ostream& os, const config_echo& echo,
                                 const classifier_report& rep) {
  echo.write(os);
  os << "x,eps,acp_ratio,weak_product,verdict\n";
  for (const classifier_cell& cell : rep.cells) {
    os << cell.x << "," << fmt_double(cell.eps) << "," << fmt_double(cell.acp_ratio) << ","
       << fmt_double(cell.weak_product) << ","
       << (cell.anomaly ? "anomaly" : "ok") << "\n";
  }
  os << "VERDICT,acp," << rep.acp_verdict << ",,\n";
  os << "VERDICT,weak," << rep.weak_verdict << ",,\n";
}

inline void write_ek_csv(std::ostream& os, const config_echo& echo, const ek_report& rep) {
  echo.write(os);
  os << "value,count\n";
  for (size_t v = 0; v < rep.histogram.size(); ++v)
    os << v << "," << rep.histogram[v] << "\n";
  os << "mean," << fmt_double(rep.sample_mean) << "\n";
  os << "variance," << fmt_double(rep.sample_variance) << "\n";
  os << "A_x," << fmt_double(rep.mean_sum) << "\n";
  os << "B_x," << fmt_double(rep.variance_sum) << "\n";
  for (int t = 1; t <= 3; ++t)
    os << "within_" << t << "sigma," << rep.within_sigma[t - 1] << "\n";
  for (int t = 1; t <= 3; ++t)
    os << "within_" << t << "sigma_fraction,"
       << fmt_double(static_cast<double>(rep.within_sigma[t - 1]) / static_cast<double>(rep.x))
       << "\n";
}

inline void write_bias_csv(std::ostream& os, const config_echo& echo,
                           const std::vector<int>& positions,
                           const std::vector<block_census>& censuses) {
  echo.write(os);
  os << "position,digit,count,frequency\n";
  for (size_t j = 0; j < positions.size(); ++j) {
    const block_census& c = censuses[j];
    for (size_t d = 0; d < c.counts.size(); ++d) {
      double freq = c.positions ? static_cast<double>(c.counts[d]) / static_cast<double>(c.positions) : 0.0;
      os << positions[j] << "," << digit_char(static_cast<int>(d)) << "," << c.counts[d] << ","
         << fmt_double(freq) << "\n";
    }
  }
}

}  // namespace addigit
