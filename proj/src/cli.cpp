#include "warpwave/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "warpwave/harness.hpp"
#include "warpwave/lrd_noise.hpp"
#include "warpwave/rates_besov.hpp"

namespace warpwave {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& field, long line, const std::string& path) {
  const std::string t = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ParseError(path + ": line " + std::to_string(line) + ": '" + t + "' is not a number",
                     line);
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& flag) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    T v{};
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size())
      throw CLI::ValidationError(flag, "'" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError(flag, "empty list");
  return out;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("WARPWAVE_SEED")) {
    std::uint64_t v = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) return v;
    throw ConfigError("WARPWAVE_SEED='" + s + "' is not an unsigned integer");
  }
  return kDefaultSeed;
}

// Writes through `fn` to `path`, or to `fallback` when the path is empty.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream file(path);
  if (!file) throw IoError("cannot open output file '" + path + "'");
  fn(file);
  if (!file) throw IoError("failed writing output file '" + path + "'");
}

struct EstimatorFlags {
  std::string wavelet = "db6";
  std::string policy = "hard";
  std::string threshold = "dj";
  std::string tau0_mode = "global";
  std::string adaptivity = "partial";
  std::optional<double> alpha;

  void attach(CLI::App* app) {
    app->add_option("--wavelet", wavelet, "haar|db2|db4|db6")->capture_default_str();
    app->add_option("--policy", policy, "hard|soft")->capture_default_str();
    app->add_option("--threshold", threshold, "dj|lrd")->capture_default_str();
    app->add_option("--tau0-mode", tau0_mode, "global|by-level")->capture_default_str();
    app->add_option("--adaptivity", adaptivity, "partial|full")->capture_default_str();
    app->add_option("--alpha", alpha, "dependence index override in (0,1]");
  }

  EstimatorConfig build() const {
    EstimatorConfig c;
    c.filter = parse_filter_name(wavelet);
    c.policy = parse_policy(policy);
    c.source = parse_source(threshold);
    c.tau0_mode = parse_tau0_mode(tau0_mode);
    c.adaptivity = parse_adaptivity(adaptivity);
    c.alpha = alpha;
    return c;
  }
};

// Rethrows configuration errors as usage errors naming the flag.
template <typename Fn>
auto as_usage(const std::string& flag, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw CLI::ValidationError(flag, e.what());
  }
}

}  // namespace

RegressionSample read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input file '" + path + "'");
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ShapeError(path + ": empty file (expected header x,y)");
  ++line_no;
  std::vector<std::string> columns;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) columns.push_back(trim(col));
  }
  if (columns.size() < 2 || columns[0] != "x" || columns[1] != "y")
    throw ParseError(path + ": line 1: expected header starting with 'x,y'", 1);

  std::vector<double> xs, ys;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != columns.size())
      throw ParseError(path + ": line " + std::to_string(line_no) + ": expected " +
                           std::to_string(columns.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    xs.push_back(parse_number(fields[0], line_no, path));
    ys.push_back(parse_number(fields[1], line_no, path));
  }
  if (xs.empty()) throw ShapeError(path + ": no data rows");
  RegressionSample sample{Eigen::Map<Vec>(xs.data(), static_cast<Eigen::Index>(xs.size())),
                          Eigen::Map<Vec>(ys.data(), static_cast<Eigen::Index>(ys.size()))};
  sample.validate();
  return sample;
}

void write_pairs_csv(std::ostream& os, const std::string& value_column, const Vec& xs,
                     const Vec& values) {
  os << "x," << value_column << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < xs.size(); ++i) os << xs[i] << ',' << values[i] << '\n';
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive warped-wavelet regression under long-range dependence", "warpwave"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  bool seed_given = false;
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "master seed (default: $WARPWAVE_SEED or 1729)")
        ->each([&](const std::string&) { seed_given = true; });
  };

  // denoise / shape
  EstimatorFlags fit_flags;
  std::string input, output;
  bool truncate = false;
  auto* denoise = app.add_subcommand("denoise", "fit f on an x,y CSV and write x,fhat");
  auto* shape = app.add_subcommand("shape", "fit f - mean(f) on an x,y CSV and write x,fhat");
  for (auto* sub : {denoise, shape}) {
    fit_flags.attach(sub);
    sub->add_option("--input", input, "x,y CSV")->required();
    sub->add_option("--output", output, "output CSV (default stdout)");
    sub->add_flag("--truncate", truncate, "thin non-power-of-two samples instead of failing");
    add_seed(sub);
  }

  // simulate
  std::string target = "doppler", scenario = "a";
  Eigen::Index n = 1024;
  double d = 0.0;
  int rep = 1;
  auto* simulate = app.add_subcommand("simulate", "write a synthetic x,y,f_true,sigma_x CSV");
  simulate->add_option("--target", target, "doppler|bumps")->capture_default_str();
  simulate->add_option("--scenario", scenario, "a|b|c")->capture_default_str();
  simulate->add_option("--n", n, "sample size")->capture_default_str();
  simulate->add_option("--d", d, "fractional integration order in [0,0.5)")->capture_default_str();
  simulate->add_option("--rep", rep, "replication index")->capture_default_str();
  simulate->add_option("--output", output, "output CSV (default stdout)");
  add_seed(simulate);

  // mc
  EstimatorFlags mc_flags;
  mc_flags.threshold = "both";
  int reps = 100;
  std::string d_grid_text;
  std::optional<double> mc_d;
  unsigned jobs = 1;
  std::string json_path, curve_path, kind = "function";
  auto* mc = app.add_subcommand("mc", "Monte Carlo MSE table (CSV + JSON)");
  mc_flags.attach(mc);
  mc->get_option("--threshold")->description("dj|lrd|both");
  mc->add_option("--target", target, "doppler|bumps")->capture_default_str();
  mc->add_option("--scenario", scenario, "a|b|c")->capture_default_str();
  mc->add_option("--n", n, "sample size")->capture_default_str();
  mc->add_option("--reps", reps, "replications")->capture_default_str();
  auto* d_opt = mc->add_option("--d", mc_d, "single d value");
  mc->add_option("--d-grid", d_grid_text, "comma-separated d values")->excludes(d_opt);
  mc->add_option("--estimator", kind, "function|shape")->capture_default_str();
  mc->add_option("--jobs", jobs, "worker threads (0 = all cores)")->capture_default_str();
  mc->add_option("--output", output, "report CSV (default stdout)");
  mc->add_option("--json", json_path, "report JSON (default: --output with .json)");
  mc->add_option("--curve", curve_path, "d,mse_mean CSV for the first source");
  add_seed(mc);

  // phase
  double s = 0, pi = 0, p = 0, alpha = 0;
  auto* phase = app.add_subcommand("phase", "rate phase, gamma and kappa as JSON");
  phase->add_option("--s", s, "smoothness")->required();
  phase->add_option("--pi", pi, "Besov scale index")->required();
  phase->add_option("--p", p, "loss exponent")->required();
  phase->add_option("--alpha", alpha, "dependence index")->required();
  add_seed(phase);

  // noise-check
  std::string n_grid_text = "256,512,1024,2048,4096,8192";
  int probe_reps = 200;
  double probe_d = 0.0;
  auto* noise = app.add_subcommand("noise-check", "partial-sum variance scaling slope");
  noise->add_option("--d", probe_d, "fractional integration order")->capture_default_str();
  noise->add_option("--n-grid", n_grid_text, "comma-separated sample sizes")->capture_default_str();
  noise->add_option("--reps", probe_reps, "replications")->capture_default_str();
  add_seed(noise);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("warpwave");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (!seed_given) seed = default_seed();

    if (denoise->parsed() || shape->parsed()) {
      EstimatorConfig cfg = as_usage("--wavelet/--policy/--threshold", [&] { return fit_flags.build(); });
      cfg.length_mode = truncate ? LengthMode::Truncate : LengthMode::Strict;
      const RegressionSample sample = read_series_csv(input);
      const FitResult fit = denoise->parsed() ? estimate_function(sample, cfg) : estimate_shape(sample, cfg);
      emit(output, out, [&](std::ostream& os) { write_pairs_csv(os, "fhat", fit.ordered_xs, fit.fitted); });
      return 0;
    }

    if (simulate->parsed()) {
      McConfig cfg;
      cfg.target = as_usage("--target", [&] { return parse_target(target); });
      cfg.scenario = as_usage("--scenario", [&] { return parse_scenario(scenario); });
      cfg.n = n;
      cfg.master_seed = seed;
      if (!is_power_of_two(n)) throw CLI::ValidationError("--n", "must be a power of two");
      const RegressionSample sample = simulate_sample(cfg, d, rep);
      const TargetFunction f(cfg.target, cfg.standardize_doppler);
      emit(output, out, [&](std::ostream& os) {
        os << "x,y,f_true,sigma_x\n" << std::setprecision(17);
        for (Eigen::Index i = 0; i < sample.size(); ++i) {
          const double x = sample.xs[i];
          os << x << ',' << sample.ys[i] << ',' << f(x) << ',' << scenario_sigma(cfg.scenario, x) << '\n';
        }
      });
      return 0;
    }

    if (mc->parsed()) {
      McConfig cfg;
      cfg.target = as_usage("--target", [&] { return parse_target(target); });
      cfg.scenario = as_usage("--scenario", [&] { return parse_scenario(scenario); });
      cfg.kind = as_usage("--estimator", [&] { return parse_estimator_kind(kind); });
      if (mc_flags.threshold == "both") {
        cfg.sources = {ThresholdSource::DjUniversal, ThresholdSource::LrdLevel};
        mc_flags.threshold = "dj";
      } else {
        cfg.sources = {as_usage("--threshold", [&] { return parse_source(mc_flags.threshold); })};
      }
      cfg.estimator = as_usage("--wavelet/--policy/--tau0-mode", [&] { return mc_flags.build(); });
      cfg.n = n;
      cfg.replications = reps;
      if (mc_d) cfg.d_grid = {*mc_d};
      if (!d_grid_text.empty()) cfg.d_grid = parse_list<double>(d_grid_text, "--d-grid");
      cfg.master_seed = seed;
      cfg.jobs = jobs;
      const McReport report = run_mc(cfg);
      emit(output, out, [&](std::ostream& os) { report.write_csv(os); });
      if (json_path.empty() && !output.empty())
        json_path = std::filesystem::path(output).replace_extension(".json").string();
      if (!json_path.empty())
        emit(json_path, out, [&](std::ostream& os) { os << std::setw(2) << report.to_json() << '\n'; });
      if (!curve_path.empty())
        emit(curve_path, out, [&](std::ostream& os) { report.write_curve_csv(os, cfg.sources.front()); });
      return 0;
    }

    if (phase->parsed()) {
      const PhaseDiagnosis diag = classify_phase(s, pi, p, alpha);
      nlohmann::json j{{"phase", to_string(diag.phase)},
                       {"gamma", diag.gamma},
                       {"kappa", diag.kappa},
                       {"alpha_D", diag.alpha_dense},
                       {"alpha_S", diag.alpha_sparse}};
      if (!diag.note.empty()) j["note"] = diag.note;
      out << j.dump() << '\n';
      return 0;
    }

    if (noise->parsed()) {
      const auto grid = parse_list<Eigen::Index>(n_grid_text, "--n-grid");
      const LrdProcessSpec spec = LrdProcessSpec::from_d(probe_d, seed);
      const LineFit fit = variance_scaling_probe(spec, grid, probe_reps);
      nlohmann::json j{{"d", probe_d},
                       {"alpha", spec.alpha()},
                       {"slope", fit.slope},
                       {"intercept", fit.intercept},
                       {"expected_slope", 2.0 - spec.alpha()}};
      out << j.dump() << '\n';
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace warpwave
