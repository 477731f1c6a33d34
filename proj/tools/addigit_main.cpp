// Command-line front end: reproducible experiments over concatenated digit
// streams of additive functions.  Every CSV output opens with a '#' header
// echoing the resolved configuration; reruns with the same flags are
// byte-identical.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "addigit/addigit.hpp"

namespace {

using namespace addigit;

uint64_t parse_count(const std::string& text, const std::string& flag) {
  try {
    size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    double r = std::round(v);
    if (!(r >= 1.0) || r > 1.8e19 || std::abs(v - r) > 1e-6 * std::max(1.0, std::abs(v)))
      throw std::invalid_argument(text);
    return static_cast<uint64_t>(r);
  } catch (const std::exception&) {
    throw config_error(flag + ": expected a positive count, got '" + text + "'");
  }
}

std::vector<uint64_t> parse_count_list(const std::string& text, const std::string& flag) {
  std::vector<uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_count(item, flag));
  if (out.empty()) throw config_error(flag + ": empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw config_error(flag + ": bad number '" + item + "'");
    }
  }
  if (out.empty()) throw config_error(flag + ": empty list");
  return out;
}

additive_spec load_spec(const std::string& arg) {
  if (arg == "Omega") return additive_spec::big_omega();
  if (arg == "omega") return additive_spec::little_omega();
  std::ifstream in(arg);
  if (!in) throw config_error("cannot open function spec file: " + arg);
  return additive_spec::parse_config(in, arg);
}

struct output_sink {
  std::ostream* os = nullptr;
  std::unique_ptr<std::ofstream> file;

  explicit output_sink(const std::string& path, bool binary = false) {
    if (path == "-") {
      os = &std::cout;
    } else {
      auto mode = binary ? std::ios::out | std::ios::binary : std::ios::out;
      file = std::make_unique<std::ofstream>(path, mode);
      if (!*file) throw config_error("cannot open output file: " + path);
      os = file.get();
    }
  }
  std::ostream& stream() { return *os; }
  bool is_stdout() const { return file == nullptr; }
};

struct common_flags {
  std::string f = "omega";
  std::string out = "-";
  int threads = 0;
  std::string seg_len = "4194304";
  std::string mem_budget = "2147483648";

  void attach(CLI::App* cmd, bool with_f = true) {
    if (with_f)
      cmd->add_option("--f", f, "function: Omega, omega, or a spec file path");
    cmd->add_option("--out", out, "output path, or - for stdout")->capture_default_str();
    cmd->add_option("--threads", threads, "worker threads (0 = machine parallelism)");
    cmd->add_option("--seg-len", seg_len, "segment length for sieving");
    cmd->add_option("--mem-budget", mem_budget, "memory budget in bytes");
  }
  run_options options() const {
    run_options o;
    o.threads = threads;
    o.segment_len = parse_count(seg_len, "--seg-len");
    o.memory_budget = parse_count(mem_budget, "--mem-budget");
    return o;
  }
  // Thread count is deliberately not echoed: results are independent of it,
  // and the emitted bytes must be too.
  void echo_into(config_echo& echo, const additive_spec& spec) const {
    echo.add("f", spec.name());
    echo.add("mode", to_string(spec.mode()));
    echo.add("value_kind", to_string(spec.kind()));
    echo.add("c", spec.c_estimated() ? fmt_double(spec.prime_constant()) + " (estimated)"
                                     : fmt_double(spec.prime_constant()));
    echo.add("seg_len", seg_len);
  }
};

void echo_schedule(config_echo& echo, const length_schedule& sched) {
  echo.add("base", sched.base.value);
  echo.add("y", sched.y);
  if (sched.forced_len) {
    echo.add("force_K", static_cast<uint64_t>(*sched.forced_len));
    echo.add("synthetic_K", "true");
  }
}

int run_app(int argc, char** argv) {
  CLI::App app{"digit streams, block statistics and exponential-sum probes for additive functions"};
  app.require_subcommand(1);

  // --- sieve ---
  auto* sieve_cmd = app.add_subcommand("sieve", "emit f(n) over a range as CSV");
  common_flags sieve_cf;
  sieve_cf.attach(sieve_cmd);
  std::string sieve_lo = "1", sieve_max;
  sieve_cmd->add_option("--lo", sieve_lo, "range start (inclusive)")->capture_default_str();
  sieve_cmd->add_option("--max", sieve_max, "range end (inclusive)")->required();

  // --- stream ---
  auto* stream_cmd = app.add_subcommand("stream", "emit the concatenated digit stream");
  common_flags stream_cf;
  stream_cf.attach(stream_cmd);
  int stream_base = 10;
  double stream_y = 0.5;
  std::string stream_max;
  std::optional<uint32_t> stream_force_k;
  std::string stream_format = "text";
  double stream_window_eps = -1.0;
  stream_cmd->add_option("--base", stream_base, "digit base")->capture_default_str();
  stream_cmd->add_option("--y", stream_y, "truncation rate y")->capture_default_str();
  stream_cmd->add_option("--force-K", stream_force_k, "force the per-n digit count (synthetic)");
  stream_cmd->add_option("--max", stream_max, "concatenate f(1..max)")->required();
  stream_cmd->add_option("--format", stream_format, "text or bin")->capture_default_str();
  stream_cmd->add_option("--window-eps", stream_window_eps,
                         "emit the windowed stream for this eps instead of the plain one");

  // --- census ---
  auto* census_cmd = app.add_subcommand("census", "block statistics of a stream file");
  common_flags census_cf;
  census_cf.attach(census_cmd, /*with_f=*/false);
  std::string census_in;
  int census_k = 1;
  int census_base = 0;
  census_cmd->add_option("--in", census_in, "stream file (text or binary)")->required();
  census_cmd->add_option("--k", census_k, "block length")->capture_default_str();
  census_cmd->add_option("--base", census_base, "digit base (required for text streams)");

  // --- count ---
  auto* count_cmd = app.add_subcommand("count", "block occurrence report for one block");
  common_flags count_cf;
  count_cf.attach(count_cmd);
  int count_base = 10;
  double count_y = 0.5;
  std::optional<uint32_t> count_force_k;
  std::string count_block, count_x;
  double count_eps = 0.1;
  count_cmd->add_option("--base", count_base, "digit base")->capture_default_str();
  count_cmd->add_option("--y", count_y, "truncation rate y")->capture_default_str();
  count_cmd->add_option("--force-K", count_force_k, "force the per-n digit count (synthetic)");
  count_cmd->add_option("--block", count_block, "digit block, e.g. 01")->required();
  count_cmd->add_option("--x", count_x, "count over n <= x")->required();
  count_cmd->add_option("--eps", count_eps, "window split parameter")->capture_default_str();

  // --- expsum ---
  auto* expsum_cmd = app.add_subcommand("expsum", "exponential sums and their predicted main term");
  common_flags expsum_cf;
  expsum_cf.attach(expsum_cmd);
  int expsum_base = 10, expsum_m = 1;
  int64_t expsum_a = 1;
  std::string expsum_grid, expsum_max, expsum_P = "1000000";
  std::string expsum_trend = "loglogx";
  expsum_cmd->add_option("--base", expsum_base, "digit base")->capture_default_str();
  expsum_cmd->add_option("--m", expsum_m, "digit position scale b^m")->capture_default_str();
  expsum_cmd->add_option("--a", expsum_a, "integer frequency a != 0")->capture_default_str();
  expsum_cmd->add_option("--grid", expsum_grid, "comma list of thresholds, e.g. 1e3,1e4,1e5");
  expsum_cmd->add_option("--max", expsum_max, "log-spaced decades 1e3..max if --grid absent");
  expsum_cmd->add_option("--P", expsum_P, "Euler product prime bound")->capture_default_str();
  expsum_cmd->add_option("--trend", expsum_trend, "decay regression covariate: loglogx or logx")
      ->capture_default_str();

  // --- classify ---
  auto* classify_cmd = app.add_subcommand("classify", "classifier condition diagnostics");
  common_flags classify_cf;
  classify_cf.attach(classify_cmd);
  double classify_c = -1.0, classify_delta = 0.25;
  std::string classify_eps = "0.1,0.2,0.4,0.8";
  std::string classify_grid = "1e3,1e4,1e5,1e6";
  classify_cmd->add_option("--c", classify_c, "prime constant c (default: from the function)");
  classify_cmd->add_option("--delta", classify_delta, "weight exponent delta in (0, 1/2)")
      ->capture_default_str();
  classify_cmd->add_option("--eps", classify_eps, "comma list of eps values")->capture_default_str();
  classify_cmd->add_option("--grid", classify_grid, "comma list of x thresholds")->capture_default_str();

  // --- ekstats ---
  auto* ek_cmd = app.add_subcommand("ekstats", "value histogram and concentration summary");
  common_flags ek_cf;
  ek_cf.attach(ek_cmd);
  std::string ek_x;
  ek_cmd->add_option("--x", ek_x, "histogram f(n) for n <= x")->required();

  // --- biasdemo ---
  auto* bias_cmd = app.add_subcommand("biasdemo", "digit census at fixed high positions");
  common_flags bias_cf;
  bias_cf.attach(bias_cmd);
  int bias_base = 2;
  std::string bias_x, bias_positions = "1";
  bias_cmd->add_option("--base", bias_base, "digit base")->capture_default_str();
  bias_cmd->add_option("--x", bias_x, "scan n <= x")->required();
  bias_cmd->add_option("--positions", bias_positions, "comma list of digit positions (LSD = 1)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (sieve_cmd->parsed()) {
    additive_spec spec = load_spec(sieve_cf.f);
    run_options opts = sieve_cf.options();
    uint64_t lo = parse_count(sieve_lo, "--lo");
    uint64_t hi = parse_count(sieve_max, "--max") + 1;
    config_echo echo;
    echo.add("command", "sieve");
    sieve_cf.echo_into(echo, spec);
    echo.add("lo", lo);
    echo.add("max", hi - 1);
    output_sink sink(sieve_cf.out);
    if (spec.integer_valued()) {
      auto fr = sieve_range<uint64_t>(spec, lo, hi, opts);
      write_values_csv(sink.stream(), echo, lo, fr.values);
    } else {
      auto fr = sieve_range<double>(spec, lo, hi, opts);
      write_values_csv(sink.stream(), echo, lo, fr.values);
    }
    return 0;
  }

  if (stream_cmd->parsed()) {
    additive_spec spec = load_spec(stream_cf.f);
    run_options opts = stream_cf.options();
    uint64_t n_max = parse_count(stream_max, "--max");
    length_schedule sched(stream_y, base_b(stream_base), stream_force_k);
    std::vector<uint8_t> digits;
    if (stream_window_eps >= 0.0) {
      digits = build_window_stream(spec, stream_window_eps, sched.half(), n_max, opts);
    } else {
      digits = build_stream(spec, sched, n_max, opts);
    }
    bool binary = stream_format == "bin";
    if (!binary && stream_format != "text")
      throw config_error("--format must be text or bin");
    output_sink sink(stream_cf.out, binary);
    if (binary) {
      write_stream_binary(sink.stream(), digits, sched.base, sched.synthetic());
    } else {
      if (!sink.is_stdout()) {
        config_echo echo;
        echo.add("command", "stream");
        stream_cf.echo_into(echo, spec);
        echo_schedule(echo, sched);
        echo.add("max", n_max);
        if (stream_window_eps >= 0.0) echo.add("window_eps", stream_window_eps);
        echo.write(sink.stream());
      }
      write_stream_text(sink.stream(), digits);
    }
    return 0;
  }

  if (census_cmd->parsed()) {
    std::ifstream in(census_in, std::ios::binary);
    if (!in) throw config_error("cannot open stream file: " + census_in);
    stream_file sf = read_stream(in);
    int base = sf.base.value_or(census_base);
    if (base == 0)
      throw config_error("census of a text stream needs --base");
    if (sf.base && census_base != 0 && *sf.base != census_base)
      throw config_error("--base contradicts the stream file header");
    config_echo echo;
    echo.add("command", "census");
    echo.add("in", census_in);
    echo.add("k", census_k);
    echo.add("base", base);
    if (sf.synthetic) echo.add("synthetic_K", "true");
    block_census c = census(sf.digits, census_k, base_b(base));
    output_sink sink(census_cf.out);
    write_census_csv(sink.stream(), echo, c);
    return 0;
  }

  if (count_cmd->parsed()) {
    additive_spec spec = load_spec(count_cf.f);
    run_options opts = count_cf.options();
    uint64_t x = parse_count(count_x, "--x");
    length_schedule sched(count_y, base_b(count_base), count_force_k);
    block blk = block::parse(count_block, base_b(count_base));
    count_report rep = count_formula(spec, sched, blk, x, count_eps, opts);
    config_echo echo;
    echo.add("command", "count");
    count_cf.echo_into(echo, spec);
    echo_schedule(echo, sched);
    echo.add("block", blk.text());
    echo.add("x", x);
    echo.add("eps", count_eps);
    output_sink sink(count_cf.out);
    write_count_csv(sink.stream(), echo, rep);
    return 0;
  }

  if (expsum_cmd->parsed()) {
    additive_spec spec = load_spec(expsum_cf.f);
    run_options opts = expsum_cf.options();
    std::vector<uint64_t> grid;
    if (!expsum_grid.empty()) {
      grid = parse_count_list(expsum_grid, "--grid");
    } else if (!expsum_max.empty()) {
      uint64_t x_max = parse_count(expsum_max, "--max");
      for (uint64_t g = 1000; g <= x_max; g *= 10) grid.push_back(g);
      if (grid.empty() || grid.back() != x_max) grid.push_back(x_max);
    } else {
      throw config_error("expsum needs --grid or --max");
    }
    uint64_t P = parse_count(expsum_P, "--P");
    trend_covariate cov;
    if (expsum_trend == "loglogx") cov = trend_covariate::log_log_x;
    else if (expsum_trend == "logx") cov = trend_covariate::log_x;
    else throw config_error("--trend must be loglogx or logx");
    exp_sum_record rec = exp_sum(spec, expsum_a, expsum_m, base_b(expsum_base), grid, opts);
    sd_prediction pred = sd_main_term(spec, expsum_a, expsum_m, base_b(expsum_base), grid, P);
    decay_profile_result decay = decay_profile(rec, cov);
    config_echo echo;
    echo.add("command", "expsum");
    expsum_cf.echo_into(echo, spec);
    echo.add("base", expsum_base);
    echo.add("m", expsum_m);
    echo.add("a", expsum_a);
    echo.add("P", P);
    output_sink sink(expsum_cf.out);
    write_expsum_csv(sink.stream(), echo, rec, pred);
    sink.stream() << "# decay_slope = " << fmt_double(decay.slope) << "\n";
    sink.stream() << "# decay_verdict = " << decay.verdict << "\n";
    sink.stream() << "# sd_tail_converged = " << (pred.converged ? "true" : "false") << "\n";
    return 0;
  }

  if (classify_cmd->parsed()) {
    additive_spec spec = load_spec(classify_cf.f);
    double c = classify_c >= 0.0 ? classify_c : spec.prime_constant();
    auto eps_grid = parse_double_list(classify_eps, "--eps");
    auto x_grid = parse_count_list(classify_grid, "--grid");
    classifier_report rep = classifier_diagnostics(spec, c, classify_delta, eps_grid, x_grid);
    config_echo echo;
    echo.add("command", "classify");
    classify_cf.echo_into(echo, spec);
    echo.add("classifier_c", c);
    echo.add("delta", classify_delta);
    echo.add("eps_grid", classify_eps);
    output_sink sink(classify_cf.out);
    write_classifier_csv(sink.stream(), echo, rep);
    return 0;
  }

  if (ek_cmd->parsed()) {
    additive_spec spec = load_spec(ek_cf.f);
    run_options opts = ek_cf.options();
    uint64_t x = parse_count(ek_x, "--x");
    ek_report rep = ek_stats(spec, x, opts);
    config_echo echo;
    echo.add("command", "ekstats");
    ek_cf.echo_into(echo, spec);
    echo.add("x", x);
    output_sink sink(ek_cf.out);
    write_ek_csv(sink.stream(), echo, rep);
    return 0;
  }

  if (bias_cmd->parsed()) {
    additive_spec spec = load_spec(bias_cf.f);
    run_options opts = bias_cf.options();
    uint64_t x = parse_count(bias_x, "--x");
    std::vector<int> positions;
    for (uint64_t p : parse_count_list(bias_positions, "--positions"))
      positions.push_back(static_cast<int>(p));
    auto censuses = bias_demo(spec, base_b(bias_base), x, positions, opts);
    config_echo echo;
    echo.add("command", "biasdemo");
    bias_cf.echo_into(echo, spec);
    echo.add("base", bias_base);
    echo.add("x", x);
    echo.add("positions", bias_positions);
    output_sink sink(bias_cf.out);
    write_bias_csv(sink.stream(), echo, positions, censuses);
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_app(argc, argv);
  } catch (const addigit::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const addigit::resource_error& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 3;
  } catch (const addigit::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
