#pragma once

// Thresholded warped-wavelet estimators: the function estimator, its
// shape counterpart (scaling block removed), and the data-driven pieces
// they need (noise-profile pilot, level weights, threshold plans).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "warpwave/design_warp.hpp"

namespace warpwave {

enum class ThresholdPolicy { Hard, Soft };
enum class ThresholdSource { DjUniversal, LrdLevel };
enum class Tau0Mode { GlobalFinest, ByLevel };
enum class Adaptivity { Partial, Full };

ThresholdPolicy parse_policy(std::string_view s);
ThresholdSource parse_source(std::string_view s);
Tau0Mode parse_tau0_mode(std::string_view s);
Adaptivity parse_adaptivity(std::string_view s);
std::string to_string(ThresholdPolicy p);
std::string to_string(ThresholdSource s);
std::string to_string(Tau0Mode m);
std::string to_string(Adaptivity a);

struct ThresholdPlan {
  ThresholdPolicy policy = ThresholdPolicy::Hard;
  ThresholdSource source = ThresholdSource::DjUniversal;
  Tau0Mode tau0_mode = Tau0Mode::GlobalFinest;
  int coarse_level = 0;
  /// lambda_j for j = coarse_level, coarse_level + 1, ...
  Vec per_level;

  double at(int level) const;
  int num_levels() const { return static_cast<int>(per_level.size()); }
  bool operator==(const ThresholdPlan&) const = default;
};

/// sigma_hat at rank positions, i.e. sigma_hat(G_n^{-1}(i/n)).
struct SigmaProfile {
  Vec values;
  void validate() const;
};

struct EstimatorConfig {
  FilterName filter = FilterName::DB6;
  ThresholdPolicy policy = ThresholdPolicy::Hard;
  ThresholdSource source = ThresholdSource::DjUniversal;
  Tau0Mode tau0_mode = Tau0Mode::GlobalFinest;
  Adaptivity adaptivity = Adaptivity::Partial;
  LengthMode length_mode = LengthMode::Strict;
  int coarse_level = 0;
  /// Multiplies every lambda_j.
  double tau0_multiplier = 1.0;
  /// Supplied dependence index; estimated from pilot residuals when empty.
  std::optional<double> alpha;
  /// Supplied noise profile; estimated by the pilot when empty.
  std::optional<SigmaProfile> sigma_profile;
  /// Scale the LRD branch of each level by m_j / max m_j instead of gating it.
  bool weighted_lrd_branch = false;
};

struct FitResult {
  /// Estimate on the rank grid, entry i at G_n^{-1}((i+1)/n).
  Vec fitted;
  Vec ordered_xs;
  Pyramid pyramid_kept{0, 0};
  ThresholdPlan plan;
  double alpha_used = 1.0;
  /// Finest retained detail level.
  int fine_cutoff = 0;
  /// Nonzero detail coefficients after thresholding, coarse to fine.
  std::vector<Eigen::Index> retained_per_level;
};

/// Median absolute deviation about the median, divided by 0.6745.
double mad_sigma(const Vec& values);

/// Pilot DJ hard fit, squared residuals averaged over ceil(n^{1/3}) equal-rank
/// bins, square-rooted into a piecewise-constant profile.
SigmaProfile estimate_sigma_profile(const RegressionSample& sample, const Filter& filter);
SigmaProfile estimate_sigma_profile_ordered(const Vec& ordered_ys, const Filter& filter);

/// m_j = 2^{-j} sum_k |c_jk| for the proxy pyramid c of the profile; values
/// below 1e-12 max(profile) are set to zero.
Vec lrd_level_weights(const SigmaProfile& profile, const Filter& filter, int coarse_level = 0);

ThresholdPlan compute_thresholds(Eigen::Index n, const Pyramid& pyramid,
                                 ThresholdSource source, ThresholdPolicy policy,
                                 double alpha_hat, const Vec& weights, Tau0Mode tau0_mode,
                                 double tau0_multiplier = 1.0,
                                 bool weighted_lrd_branch = false);

/// Thresholds every detail coefficient; the scaling block is left unchanged.
Pyramid apply_threshold(const Pyramid& pyramid, const ThresholdPlan& plan);

/// Finest kept detail level: 2^j1 = n/2 (partial) or the largest power of
/// two <= sqrt(n / ln n) (full).
int fine_cutoff(Eigen::Index n, Adaptivity mode);

FitResult estimate_function(const RegressionSample& sample, const EstimatorConfig& config);
FitResult estimate_shape(const RegressionSample& sample, const EstimatorConfig& config);

/// Runs the estimator with an externally fixed plan (no pilot, no alpha).
FitResult fit_with_plan(const RegressionSample& sample, const EstimatorConfig& config,
                        const ThresholdPlan& plan, bool shape);

}  // namespace warpwave
