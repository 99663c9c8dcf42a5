#include "warpwave/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "warpwave/lrd_noise.hpp"

namespace warpwave {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower_mid = *std::max_element(v.begin(), mid);
  return 0.5 * (lower_mid + upper);
}

struct Prepared {
  OrderedPairs ordered;
  Filter filter;
  Pyramid pyramid;
};

Prepared prepare(const RegressionSample& sample, const EstimatorConfig& config) {
  OrderedPairs ordered = order_pairs(sample);
  if (!is_power_of_two(sample.size())) {
    if (config.length_mode == LengthMode::Strict)
      throw ShapeError("sample size " + std::to_string(sample.size()) +
                       " is not a power of two");
    ordered = thin_to_power_of_two(ordered);
  }
  Filter filter = build_filter<double>(config.filter);
  Pyramid pyr = proxy_coefficients(ordered.ordered_ys, filter, config.coarse_level);
  return {std::move(ordered), std::move(filter), std::move(pyr)};
}

// Pilot DJ hard fit on the rank grid; returns ordered residuals.
Vec pilot_residuals(const Vec& ordered_ys, const Filter& filter) {
  const Eigen::Index n = ordered_ys.size();
  const Pyramid pyr = proxy_coefficients(ordered_ys, filter, 0);
  const ThresholdPlan plan =
      compute_thresholds(n, pyr, ThresholdSource::DjUniversal, ThresholdPolicy::Hard, 1.0,
                         Vec::Zero(pyr.num_detail_levels()), Tau0Mode::GlobalFinest);
  const Vec pilot = fitted_on_design_grid(apply_threshold(pyr, plan), filter);
  return ordered_ys - pilot;
}

SigmaProfile profile_from_residuals(const Vec& residuals) {
  const Eigen::Index n = residuals.size();
  const auto bins = static_cast<Eigen::Index>(std::ceil(std::cbrt(static_cast<double>(n)) - 1e-9));
  SigmaProfile profile{Vec(n)};
  for (Eigen::Index b = 0; b < bins; ++b) {
    const Eigen::Index lo = b * n / bins;
    const Eigen::Index hi = (b + 1) * n / bins;
    const double var = residuals.segment(lo, hi - lo).squaredNorm() / static_cast<double>(hi - lo);
    profile.values.segment(lo, hi - lo).setConstant(std::sqrt(var));
  }
  return profile;
}

// Residuals standardized by the profile and restored to observation order,
// which is the index the noise process runs along.
Vec residuals_in_time_order(const Vec& residuals, const SigmaProfile& profile,
                            const std::vector<Eigen::Index>& permutation) {
  const Eigen::Index n = residuals.size();
  std::vector<std::pair<Eigen::Index, double>> tagged(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = profile.values[i];
    tagged[static_cast<std::size_t>(i)] = {permutation[static_cast<std::size_t>(i)],
                                           s > 0.0 ? residuals[i] / s : residuals[i]};
  }
  std::sort(tagged.begin(), tagged.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Vec out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = tagged[static_cast<std::size_t>(i)].second;
  return out;
}

void zero_above(Pyramid& pyr, int cutoff) {
  for (int j = std::max(cutoff + 1, pyr.coarse_level()); j <= pyr.fine_level(); ++j)
    pyr.detail(j).setZero();
}

FitResult finish(Prepared prep, ThresholdPlan plan, double alpha_used, int cutoff, bool shape) {
  Pyramid kept = apply_threshold(prep.pyramid, plan);
  zero_above(kept, cutoff);
  if (shape) kept.scaling().setZero();

  FitResult out;
  out.fitted = fitted_on_design_grid(kept, prep.filter);
  out.ordered_xs = std::move(prep.ordered.ordered_xs);
  for (const auto& d : kept.details())
    out.retained_per_level.push_back(static_cast<Eigen::Index>((d.array() != 0.0).count()));
  out.pyramid_kept = std::move(kept);
  out.plan = std::move(plan);
  out.alpha_used = alpha_used;
  out.fine_cutoff = cutoff;
  return out;
}

FitResult estimate(const RegressionSample& sample, const EstimatorConfig& config, bool shape) {
  Prepared prep = prepare(sample, config);
  const Eigen::Index n = prep.ordered.ordered_ys.size();
  const int cutoff = std::min(fine_cutoff(n, config.adaptivity), prep.pyramid.fine_level());

  double alpha = config.alpha.value_or(1.0);
  Vec weights = Vec::Zero(prep.pyramid.num_detail_levels());
  if (config.source == ThresholdSource::LrdLevel) {
    std::optional<Vec> residuals;
    SigmaProfile profile;
    if (config.sigma_profile) {
      profile = *config.sigma_profile;
      profile.validate();
      if (profile.values.size() != n)
        throw ShapeError("sigma profile length does not match the sample");
    } else {
      residuals = pilot_residuals(prep.ordered.ordered_ys, prep.filter);
      if (n < 64) throw DomainError("noise profile estimation needs n >= 64");
      profile = profile_from_residuals(*residuals);
    }
    weights = lrd_level_weights(profile, prep.filter, config.coarse_level);
    if (!config.alpha) {
      if (!residuals) residuals = pilot_residuals(prep.ordered.ordered_ys, prep.filter);
      alpha = estimate_alpha(residuals_in_time_order(*residuals, profile, prep.ordered.permutation));
    }
  }
  ThresholdPlan plan =
      compute_thresholds(n, prep.pyramid, config.source, config.policy, alpha, weights,
                         config.tau0_mode, config.tau0_multiplier, config.weighted_lrd_branch);
  return finish(std::move(prep), std::move(plan), alpha, cutoff, shape);
}

}  // namespace

ThresholdPolicy parse_policy(std::string_view s) {
  const auto v = lower(s);
  if (v == "hard") return ThresholdPolicy::Hard;
  if (v == "soft") return ThresholdPolicy::Soft;
  throw ConfigError("unknown threshold policy '" + std::string(s) + "' (expected hard or soft)");
}

ThresholdSource parse_source(std::string_view s) {
  const auto v = lower(s);
  if (v == "dj" || v == "dj_universal") return ThresholdSource::DjUniversal;
  if (v == "lrd" || v == "lrd_level") return ThresholdSource::LrdLevel;
  throw ConfigError("unknown threshold source '" + std::string(s) + "' (expected dj or lrd)");
}

Tau0Mode parse_tau0_mode(std::string_view s) {
  const auto v = lower(s);
  if (v == "global" || v == "global_finest") return Tau0Mode::GlobalFinest;
  if (v == "by-level" || v == "by_level") return Tau0Mode::ByLevel;
  throw ConfigError("unknown tau0 mode '" + std::string(s) + "' (expected global or by-level)");
}

Adaptivity parse_adaptivity(std::string_view s) {
  const auto v = lower(s);
  if (v == "partial") return Adaptivity::Partial;
  if (v == "full") return Adaptivity::Full;
  throw ConfigError("unknown adaptivity '" + std::string(s) + "' (expected partial or full)");
}

std::string to_string(ThresholdPolicy p) { return p == ThresholdPolicy::Hard ? "hard" : "soft"; }
std::string to_string(ThresholdSource s) { return s == ThresholdSource::DjUniversal ? "dj" : "lrd"; }
std::string to_string(Tau0Mode m) { return m == Tau0Mode::GlobalFinest ? "global" : "by-level"; }
std::string to_string(Adaptivity a) { return a == Adaptivity::Partial ? "partial" : "full"; }

double ThresholdPlan::at(int level) const {
  const int idx = level - coarse_level;
  if (idx < 0 || idx >= num_levels())
    throw ShapeError("threshold plan has no level " + std::to_string(level));
  return per_level[idx];
}

void SigmaProfile::validate() const {
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]) || values[i] < 0.0)
      throw DomainError("sigma profile entries must be finite and non-negative");
}

double mad_sigma(const Vec& values) {
  if (values.size() == 0) throw ShapeError("MAD of an empty vector");
  std::vector<double> v(values.begin(), values.end());
  const double med = median_inplace(v);
  for (auto& x : v) x = std::abs(x - med);
  return median_inplace(v) / 0.6745;
}

SigmaProfile estimate_sigma_profile_ordered(const Vec& ordered_ys, const Filter& filter) {
  const Eigen::Index n = ordered_ys.size();
  if (!is_power_of_two(n)) throw ShapeError("noise profile estimation needs a power-of-two n");
  if (n < 64) throw DomainError("noise profile estimation needs n >= 64");
  return profile_from_residuals(pilot_residuals(ordered_ys, filter));
}

SigmaProfile estimate_sigma_profile(const RegressionSample& sample, const Filter& filter) {
  return estimate_sigma_profile_ordered(order_pairs(sample).ordered_ys, filter);
}

Vec lrd_level_weights(const SigmaProfile& profile, const Filter& filter, int coarse_level) {
  profile.validate();
  const Pyramid c = proxy_coefficients(profile.values, filter, coarse_level);
  // Transform round-off on a constant profile is not a level signal.
  const double floor = 1e-12 * (profile.values.size() > 0 ? profile.values.maxCoeff() : 0.0);
  Vec m(c.num_detail_levels());
  for (int j = c.coarse_level(); j <= c.fine_level(); ++j) {
    const double v = c.detail(j).cwiseAbs().mean();
    m[j - c.coarse_level()] = v > floor ? v : 0.0;
  }
  return m;
}

ThresholdPlan compute_thresholds(Eigen::Index n, const Pyramid& pyramid, ThresholdSource source,
                                 ThresholdPolicy policy, double alpha_hat, const Vec& weights,
                                 Tau0Mode tau0_mode, double tau0_multiplier,
                                 bool weighted_lrd_branch) {
  if (!(alpha_hat > 0.0 && alpha_hat <= 1.0))
    throw DomainError("alpha_hat must lie in (0, 1], got " + std::to_string(alpha_hat));
  if (n < 2) throw DomainError("threshold computation needs n >= 2");
  if (!(tau0_multiplier >= 0.0)) throw DomainError("tau0 multiplier must be non-negative");
  const int levels = pyramid.num_detail_levels();
  if (weights.size() != levels)
    throw ShapeError("level weights do not match the pyramid's detail levels");

  const double nn = static_cast<double>(n);
  const double root_n = std::sqrt(nn);
  const double log_n = std::log(nn);

  // Noise scale on the raw (sqrt(n) * beta_hat) coefficient scale.
  auto raw_sigma = [&](int level) { return mad_sigma(pyramid.detail(level) * root_n); };
  const double global_sigma = raw_sigma(pyramid.fine_level());

  const double max_weight = levels > 0 ? weights.maxCoeff() : 0.0;
  const double tol = 1e-3 * max_weight;

  ThresholdPlan plan;
  plan.policy = policy;
  plan.source = source;
  plan.tau0_mode = tau0_mode;
  plan.coarse_level = pyramid.coarse_level();
  plan.per_level.resize(levels);
  for (int idx = 0; idx < levels; ++idx) {
    const int level = pyramid.coarse_level() + idx;
    const double tau0 =
        tau0_multiplier * (tau0_mode == Tau0Mode::GlobalFinest ? global_sigma : raw_sigma(level));
    double lambda = 0.0;
    if (source == ThresholdSource::DjUniversal) {
      lambda = std::sqrt(2.0 * log_n) / root_n;
    } else {
      const double lrd_branch = std::sqrt(log_n) / std::pow(nn, alpha_hat / 2.0);
      double gate = weights[idx] > tol ? 1.0 : 0.0;
      if (weighted_lrd_branch) gate = max_weight > 0.0 ? weights[idx] / max_weight : 0.0;
      lambda = std::max(log_n / root_n, gate * lrd_branch);
    }
    plan.per_level[idx] = tau0 * lambda;
  }
  return plan;
}

Pyramid apply_threshold(const Pyramid& pyramid, const ThresholdPlan& plan) {
  if (plan.coarse_level != pyramid.coarse_level() ||
      plan.num_levels() != pyramid.num_detail_levels())
    throw ShapeError("threshold plan levels do not match the pyramid");
  Pyramid out = pyramid;
  for (int j = out.coarse_level(); j <= out.fine_level(); ++j) {
    const double lambda = plan.at(j);
    auto& d = out.detail(j);
    if (plan.policy == ThresholdPolicy::Hard) {
      d = (d.array().abs() >= lambda).select(d, 0.0);
    } else {
      d = d.array().sign() * (d.array().abs() - lambda).max(0.0);
    }
  }
  return out;
}

int fine_cutoff(Eigen::Index n, Adaptivity mode) {
  if (n < 2) throw DomainError("fine cutoff needs n >= 2");
  const double nn = static_cast<double>(n);
  const double target = mode == Adaptivity::Partial ? nn / 2.0 : std::sqrt(nn / std::log(nn));
  int j = 0;
  while (std::ldexp(1.0, j + 1) <= target) ++j;
  return j;
}

FitResult estimate_function(const RegressionSample& sample, const EstimatorConfig& config) {
  return estimate(sample, config, false);
}

FitResult estimate_shape(const RegressionSample& sample, const EstimatorConfig& config) {
  return estimate(sample, config, true);
}

FitResult fit_with_plan(const RegressionSample& sample, const EstimatorConfig& config,
                        const ThresholdPlan& plan, bool shape) {
  Prepared prep = prepare(sample, config);
  const Eigen::Index n = prep.ordered.ordered_ys.size();
  const int cutoff = std::min(fine_cutoff(n, config.adaptivity), prep.pyramid.fine_level());
  return finish(std::move(prep), plan, config.alpha.value_or(1.0), cutoff, shape);
}

}  // namespace warpwave
