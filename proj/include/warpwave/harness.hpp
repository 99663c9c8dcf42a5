#pragma once

// Monte Carlo reproduction harness: test targets, noise scenarios, SNR
// calibration, replicated MSE tables and empirical rate slopes.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "warpwave/estimators.hpp"
#include "warpwave/rates_besov.hpp"

namespace warpwave {

inline constexpr std::uint64_t kDefaultSeed = 1729;
inline constexpr double kTargetSnrDb = 9.34;
inline constexpr double kReferenceSigma = 0.1;

enum class Target { Doppler, Bumps, Lidar };
enum class Scenario { A, B, C };
enum class EstimatorKind { Function, Shape };

Target parse_target(std::string_view s);
Scenario parse_scenario(std::string_view s);
EstimatorKind parse_estimator_kind(std::string_view s);
std::string to_string(Target t);
std::string to_string(Scenario s);
std::string to_string(EstimatorKind k);

double doppler(double x);
/// Donoho-Johnstone Bumps before any rescaling.
double bumps(double x);

/// Raw target values; Lidar has no closed form and raises ConfigError.
Vec eval_target(Target target, const Vec& grid);

struct SnrResult {
  Vec values;
  double scale;
  double achieved_snr_db;
};

/// Rescales so that 10 log10(mean(values^2) / sigma_ref^2) equals target_db.
SnrResult snr_standardize(const Vec& values, double sigma_ref, double target_db = kTargetSnrDb);

double scenario_sigma(Scenario scenario, double x);

/// A target with its calibration factor. Doppler is used as given unless
/// `standardize` is set; Bumps is always calibrated to the reference SNR.
class TargetFunction {
 public:
  static constexpr int kCalibrationLog2 = 16;

  explicit TargetFunction(Target target, bool standardize = false);

  double operator()(double x) const;
  Vec operator()(const Vec& x) const;
  Target target() const { return target_; }
  double scale() const { return scale_; }

 private:
  Target target_;
  double scale_ = 1.0;
};

struct McConfig {
  Target target = Target::Doppler;
  Scenario scenario = Scenario::A;
  Eigen::Index n = 1024;
  int replications = 100;
  std::vector<double> d_grid{0.0};
  /// One report row per (d, source); all sources share each replication's data.
  std::vector<ThresholdSource> sources{ThresholdSource::DjUniversal};
  EstimatorConfig estimator;
  EstimatorKind kind = EstimatorKind::Function;
  std::uint64_t master_seed = kDefaultSeed;
  /// Multiplies sigma(x); 0 gives noiseless data.
  double sigma_scale = 1.0;
  /// Hand the estimator the true sigma(X_(i)) instead of the pilot profile.
  bool oracle_sigma = false;
  bool standardize_doppler = false;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned jobs = 1;

  void validate() const;
};

struct McRow {
  double d;
  Scenario scenario;
  Target target;
  ThresholdSource source;
  ThresholdPolicy policy;
  double mse_mean;
  double mse_stderr;
  int replications;
};

struct McReport {
  std::vector<McRow> rows;

  void write_csv(std::ostream& os) const;
  nlohmann::json to_json() const;
  /// `d,mse_mean` rows for one threshold source.
  void write_curve_csv(std::ostream& os, ThresholdSource source) const;
};

/// Simulated sample of one replication; deterministic in (config, d, rep).
RegressionSample simulate_sample(const McConfig& config, double d, int rep);

/// MSE against f(i/n) (or f - mean f for the shape estimator) for every
/// configured source, in `config.sources` order.
std::vector<double> replication_mse(const McConfig& config, double d, int rep);

/// MSE for the first configured source.
double run_replication(const McConfig& config, double d, int rep);

McReport run_mc(const McConfig& config);

struct RateSlopeReport {
  std::vector<Eigen::Index> n_grid;
  std::vector<double> mse_mean;
  double empirical_slope;
  /// Range of -gamma over smoothness s in [0.66, 10] with pi = p = 2 at the
  /// dependence index alpha = 1 - 2d.
  double predicted_slope_min;
  double predicted_slope_max;
};

RateSlopeReport rate_slope_experiment(const McConfig& config, std::span<const Eigen::Index> n_grid,
                                      double d);

}  // namespace warpwave
