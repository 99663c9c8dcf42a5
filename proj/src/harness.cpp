#include "warpwave/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <thread>

#include "warpwave/lrd_noise.hpp"

namespace warpwave {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

constexpr double kBumpLocations[] = {0.1, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81};
constexpr double kBumpHeights[] = {4, 5, 3, 4, 5, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2};
constexpr double kBumpWidths[] = {0.005, 0.005, 0.006, 0.01, 0.01, 0.03,
                                  0.01,  0.01,  0.005, 0.008, 0.005};

Vec regular_grid(Eigen::Index n) {
  Vec g(n);
  for (Eigen::Index i = 0; i < n; ++i) g[i] = static_cast<double>(i + 1) / static_cast<double>(n);
  return g;
}

}  // namespace

Target parse_target(std::string_view s) {
  const auto v = lower(s);
  if (v == "doppler") return Target::Doppler;
  if (v == "bumps") return Target::Bumps;
  if (v == "lidar") return Target::Lidar;
  throw ConfigError("unknown target '" + std::string(s) + "' (expected doppler or bumps)");
}

Scenario parse_scenario(std::string_view s) {
  const auto v = lower(s);
  if (v == "a") return Scenario::A;
  if (v == "b") return Scenario::B;
  if (v == "c") return Scenario::C;
  throw ConfigError("unknown scenario '" + std::string(s) + "' (expected a, b or c)");
}

EstimatorKind parse_estimator_kind(std::string_view s) {
  const auto v = lower(s);
  if (v == "function") return EstimatorKind::Function;
  if (v == "shape") return EstimatorKind::Shape;
  throw ConfigError("unknown estimator kind '" + std::string(s) + "'");
}

std::string to_string(Target t) {
  switch (t) {
    case Target::Doppler: return "doppler";
    case Target::Bumps: return "bumps";
    case Target::Lidar: return "lidar";
  }
  return "unknown";
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::A: return "a";
    case Scenario::B: return "b";
    case Scenario::C: return "c";
  }
  return "unknown";
}

std::string to_string(EstimatorKind k) { return k == EstimatorKind::Function ? "function" : "shape"; }

double doppler(double x) {
  return std::sqrt(x * (1.0 - x)) * std::sin(2.0 * M_PI * 1.05 / (x + 1.05));
}

double bumps(double x) {
  double f = 0.0;
  for (std::size_t j = 0; j < std::size(kBumpLocations); ++j)
    f += kBumpHeights[j] * std::pow(1.0 + std::abs((x - kBumpLocations[j]) / kBumpWidths[j]), -4.0);
  return f;
}

Vec eval_target(Target target, const Vec& grid) {
  Vec out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("target grid values must lie in [0, 1]");
    switch (target) {
      case Target::Doppler: out[i] = doppler(x); break;
      case Target::Bumps: out[i] = bumps(x); break;
      case Target::Lidar:
        throw ConfigError("lidar target has no closed-form definition; supply data via --input");
    }
  }
  return out;
}

SnrResult snr_standardize(const Vec& values, double sigma_ref, double target_db) {
  if (!(sigma_ref > 0.0)) throw DomainError("reference sigma must be positive");
  const double power = values.squaredNorm() / static_cast<double>(values.size());
  if (values.size() == 0 || !(power > 0.0)) throw DomainError("cannot standardize an all-zero signal");
  const double wanted = sigma_ref * sigma_ref * std::pow(10.0, target_db / 10.0);
  SnrResult out;
  out.scale = std::sqrt(wanted / power);
  out.values = values * out.scale;
  const double achieved = out.values.squaredNorm() / static_cast<double>(values.size());
  out.achieved_snr_db = 10.0 * std::log10(achieved / (sigma_ref * sigma_ref));
  return out;
}

double scenario_sigma(Scenario scenario, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("scenario sigma is defined on [0, 1]");
  switch (scenario) {
    case Scenario::A: return 0.1;
    case Scenario::B: return 0.1 * std::sqrt(12.0 / 13.0) * (x + 0.5);
    case Scenario::C: {
      const double step = x > 0.4 ? 1.0 : (x < 0.4 ? -1.0 : 0.0);
      return 0.1 * (std::sin(M_PI * x) - step);
    }
  }
  throw ConfigError("unknown scenario");
}

TargetFunction::TargetFunction(Target target, bool standardize) : target_(target) {
  if (target == Target::Lidar)
    throw ConfigError("lidar target has no closed-form definition");
  if (target == Target::Bumps || standardize) {
    const Vec grid = regular_grid(Eigen::Index{1} << kCalibrationLog2);
    scale_ = snr_standardize(eval_target(target, grid), kReferenceSigma).scale;
  }
}

double TargetFunction::operator()(double x) const {
  return scale_ * (target_ == Target::Doppler ? doppler(x) : bumps(x));
}

Vec TargetFunction::operator()(const Vec& x) const { return eval_target(target_, x) * scale_; }

void McConfig::validate() const {
  if (replications < 1) throw DomainError("replications must be >= 1");
  if (!is_power_of_two(n) || n < 64) throw ShapeError("n must be a power of two >= 64");
  if (d_grid.empty()) throw DomainError("d grid is empty");
  for (double d : d_grid)
    if (!(d >= 0.0 && d < 0.5)) throw DomainError("d grid values must lie in [0, 0.5)");
  if (sources.empty()) throw ConfigError("no threshold source selected");
  if (!(sigma_scale >= 0.0)) throw DomainError("sigma scale must be non-negative");
}

RegressionSample simulate_sample(const McConfig& config, double d, int rep) {
  const TargetFunction f(config.target, config.standardize_doppler);
  const auto r = static_cast<std::uint64_t>(rep);
  auto design_rng = make_stream(config.master_seed, r, StreamTag::Design);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RegressionSample sample{Vec(config.n), Vec(config.n)};
  for (Eigen::Index i = 0; i < config.n; ++i) sample.xs[i] = unif(design_rng);
  const Vec eps = generate_lrd(LrdProcessSpec::from_d(d, config.master_seed), config.n, r).values;
  for (Eigen::Index i = 0; i < config.n; ++i) {
    const double x = sample.xs[i];
    sample.ys[i] = f(x) + config.sigma_scale * scenario_sigma(config.scenario, x) * eps[i];
  }
  return sample;
}

std::vector<double> replication_mse(const McConfig& config, double d, int rep) {
  const TargetFunction f(config.target, config.standardize_doppler);
  const RegressionSample sample = simulate_sample(config, d, rep);
  Vec truth = f(regular_grid(config.n));
  if (config.kind == EstimatorKind::Shape) truth.array() -= truth.mean();

  EstimatorConfig est = config.estimator;
  if (config.oracle_sigma) {
    Vec sorted = sample.xs;
    std::sort(sorted.begin(), sorted.end());
    SigmaProfile profile{Vec(config.n)};
    for (Eigen::Index i = 0; i < config.n; ++i)
      profile.values[i] = std::abs(config.sigma_scale * scenario_sigma(config.scenario, sorted[i]));
    est.sigma_profile = profile;
  }

  std::vector<double> out;
  for (ThresholdSource source : config.sources) {
    est.source = source;
    const FitResult fit = config.kind == EstimatorKind::Function ? estimate_function(sample, est)
                                                                 : estimate_shape(sample, est);
    out.push_back((truth - fit.fitted).squaredNorm() / static_cast<double>(config.n));
  }
  return out;
}

double run_replication(const McConfig& config, double d, int rep) {
  return replication_mse(config, d, rep).front();
}

McReport run_mc(const McConfig& config) {
  config.validate();
  const std::size_t n_d = config.d_grid.size();
  const auto reps = static_cast<std::size_t>(config.replications);
  const std::size_t tasks = n_d * reps;
  std::vector<std::vector<double>> results(tasks);

  unsigned workers = config.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.jobs;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, tasks));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t t = next++; t < tasks && !failed; t = next++) {
      try {
        results[t] = replication_mse(config, config.d_grid[t / reps], static_cast<int>(t % reps) + 1);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  McReport report;
  for (std::size_t di = 0; di < n_d; ++di) {
    for (std::size_t si = 0; si < config.sources.size(); ++si) {
      double sum = 0.0, sum_sq = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        const double v = results[di * reps + r][si];
        sum += v;
        sum_sq += v * v;
      }
      const double mean = sum / static_cast<double>(reps);
      double stderr_ = 0.0;
      if (reps > 1) {
        const double var = std::max(0.0, (sum_sq - static_cast<double>(reps) * mean * mean) /
                                             static_cast<double>(reps - 1));
        stderr_ = std::sqrt(var / static_cast<double>(reps));
      }
      report.rows.push_back({config.d_grid[di], config.scenario, config.target, config.sources[si],
                             config.estimator.policy, mean, stderr_, config.replications});
    }
  }
  return report;
}

void McReport::write_csv(std::ostream& os) const {
  os << "d,scenario,target,source,policy,mse_mean,mse_stderr,reps\n";
  os << std::setprecision(17);
  for (const auto& r : rows)
    os << r.d << ',' << to_string(r.scenario) << ',' << to_string(r.target) << ','
       << to_string(r.source) << ',' << to_string(r.policy) << ',' << r.mse_mean << ','
       << r.mse_stderr << ',' << r.replications << '\n';
}

nlohmann::json McReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows)
    rows_json.push_back({{"d", r.d},
                         {"scenario", to_string(r.scenario)},
                         {"target", to_string(r.target)},
                         {"source", to_string(r.source)},
                         {"policy", to_string(r.policy)},
                         {"mse_mean", r.mse_mean},
                         {"mse_stderr", r.mse_stderr},
                         {"reps", r.replications}});
  return {{"rows", rows_json}};
}

void McReport::write_curve_csv(std::ostream& os, ThresholdSource source) const {
  os << "d,mse_mean\n" << std::setprecision(17);
  for (const auto& r : rows)
    if (r.source == source) os << r.d << ',' << r.mse_mean << '\n';
}

RateSlopeReport rate_slope_experiment(const McConfig& config, std::span<const Eigen::Index> n_grid,
                                      double d) {
  if (n_grid.size() < 4) throw DomainError("rate experiment needs at least 4 sample sizes");
  for (std::size_t i = 0; i < n_grid.size(); ++i)
    if (!is_power_of_two(n_grid[i]) || (i > 0 && n_grid[i] <= n_grid[i - 1]))
      throw DomainError("rate experiment sample sizes must be ascending powers of two");

  RateSlopeReport rep;
  std::vector<double> log_n, log_mse;
  for (Eigen::Index n : n_grid) {
    McConfig c = config;
    c.n = n;
    c.d_grid = {d};
    c.sources = {config.sources.front()};
    const double mse = run_mc(c).rows.front().mse_mean;
    rep.n_grid.push_back(n);
    rep.mse_mean.push_back(mse);
    log_n.push_back(std::log(static_cast<double>(n)));
    log_mse.push_back(std::log(mse));
  }
  rep.empirical_slope = fit_line(log_n, log_mse).slope;

  const double alpha = 1.0 - 2.0 * d;
  rep.predicted_slope_min = 0.0;
  rep.predicted_slope_max = -1.0;
  for (double s = 0.66; s <= 10.0; s += 0.01) {
    const double g = classify_phase(s, 2.0, 2.0, alpha).gamma;
    rep.predicted_slope_min = std::min(rep.predicted_slope_min, -g);
    rep.predicted_slope_max = std::max(rep.predicted_slope_max, -g);
  }
  return rep;
}

}  // namespace warpwave
