#pragma once

// Long-range-dependent Gaussian noise: a truncated FARIMA(0,d,0) moving
// average of i.i.d. standard Gaussian innovations, with d = (1 - alpha)/2,
// plus estimators for the dependence index.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "warpwave/design_warp.hpp"

namespace warpwave {

/// Tags separating independent random streams of the same replication.
enum class StreamTag : std::uint64_t { Design = 1, Noise = 2, Auxiliary = 3 };

/// One mt19937_64 engine per (seed, replication, tag); streams never overlap
/// in practice and do not depend on execution order.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t replication,
                            StreamTag tag);

class LrdProcessSpec {
 public:
  static constexpr Eigen::Index kMinTruncation = 10000;
  static constexpr Eigen::Index kTruncationPerSample = 128;

  /// alpha in (0, 1]; truncation 0 selects max(10^4, 128 n) at generation time.
  static LrdProcessSpec from_alpha(double alpha, std::uint64_t seed,
                                   Eigen::Index truncation = 0);
  /// d in [0, 1/2).
  static LrdProcessSpec from_d(double d, std::uint64_t seed,
                               Eigen::Index truncation = 0);

  double alpha() const { return alpha_; }
  double d() const { return d_; }
  std::uint64_t seed() const { return seed_; }
  Eigen::Index truncation_for(Eigen::Index n) const;

 private:
  LrdProcessSpec(double alpha, double d, std::uint64_t seed, Eigen::Index truncation)
      : alpha_(alpha), d_(d), seed_(seed), truncation_(truncation) {}

  double alpha_;
  double d_;
  std::uint64_t seed_;
  Eigen::Index truncation_;
};

/// a_0 .. a_count of (1 - B)^{-d}: a_0 = 1, a_m = a_{m-1} (m - 1 + d) / m.
Vec farima_coefficients(double d, Eigen::Index count);

struct LrdSeries {
  Vec values;
  /// sum of a_m^2 over the truncated filter
  double marginal_variance;
};

LrdSeries generate_lrd(const LrdProcessSpec& spec, Eigen::Index n,
                       std::uint64_t replication);

/// sum_{i<=n} eps_i of the series generate_lrd(spec, n_grid.back(), replication)
/// for every n in the ascending grid, evaluated directly on the innovations
/// through cumulative filter weights.
std::vector<double> lrd_partial_sums(const LrdProcessSpec& spec,
                                     std::span<const Eigen::Index> n_grid,
                                     std::uint64_t replication);

struct LineFit {
  double slope;
  double intercept;
};

/// Ordinary least squares y = intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fits log Var(sum_{i<=n} eps_i) against log n over `n_grid`; the slope
/// estimates 2 - alpha.
LineFit variance_scaling_probe(const LrdProcessSpec& spec,
                               std::span<const Eigen::Index> n_grid, int reps);

/// Log-periodogram (GPH) regression over the lowest floor(sqrt(n)) Fourier
/// frequencies; returns 1 - 2 d_hat clamped to [0.01, 1].
double estimate_alpha(const Vec& series);

/// Periodogram |sum_t x_t e^{-i lambda_j t}|^2 / (2 pi n) at lambda_j = 2 pi j / n
/// for j = 1..count, after removing the sample mean.
Vec periodogram(const Vec& series, Eigen::Index count);

double sample_autocorrelation(const Vec& series, Eigen::Index lag);

}  // namespace warpwave
