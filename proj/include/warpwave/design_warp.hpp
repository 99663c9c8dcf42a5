#pragma once

// Random-design handling: the empirical distribution of the design points and
// the rank-based proxy that turns warped wavelet coefficients
//   (1/n) sum_i psi_jk(G_n(X_i)) Y_i = (1/n) sum_i psi_jk(i/n) Y_(i)
// into an ordinary pyramid transform of the responses sorted by design point.

#include <vector>

#include "warpwave/wavelet.hpp"

namespace warpwave {

using Vec = Vector<double>;
using Pyramid = CoefficientPyramid<double>;
using Filter = WaveletFilter<double>;

struct RegressionSample {
  Vec xs;
  Vec ys;

  Eigen::Index size() const { return xs.size(); }

  /// Throws ShapeError on length mismatch or emptiness, DomainError on
  /// non-finite design points (or points outside [0,1] if requested).
  void validate(bool require_unit_support = false) const;
};

class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(Vec xs);

  /// (1/n) #{x_i <= x}
  double operator()(double x) const;

  /// Generalized inverse at i/n: the i-th order statistic (1-based).
  double order_statistic(Eigen::Index i) const;

  const Vec& sorted_xs() const { return sorted_; }
  Eigen::Index size() const { return sorted_.size(); }

 private:
  Vec sorted_;
};

EmpiricalCdf empirical_cdf(const Vec& xs);

struct OrderedPairs {
  Vec ordered_xs;
  Vec ordered_ys;
  /// ordered_ys[i] == ys[permutation[i]]
  std::vector<Eigen::Index> permutation;
};

/// Sorts the sample by design point; ties keep their original order.
OrderedPairs order_pairs(const RegressionSample& sample);

enum class LengthMode {
  Strict,    ///< n must be a power of two
  Truncate,  ///< evenly thin the ordered sample to the largest 2^J <= n
};

/// Picks 2^J evenly spaced ranks (i * n / 2^J) from an ordered sample.
OrderedPairs thin_to_power_of_two(const OrderedPairs& ordered);

/// Pyramid of ordered responses on the 1/sqrt(n) coefficient scale.
Pyramid proxy_coefficients(const Vec& ordered_ys, const Filter& filter,
                           int coarse_level = 0);

Pyramid empirical_coefficients(const RegressionSample& sample, const Filter& filter,
                               int coarse_level = 0,
                               LengthMode mode = LengthMode::Strict);

/// Split-sample variant: `cdf_part` builds G_n, responses of `coef_part` are
/// binned onto the rank grid at ceil(n G_n(X_i)) and transformed. Both parts
/// must have the same power-of-two size.
Pyramid split_sample_coefficients(const RegressionSample& cdf_part,
                                  const RegressionSample& coef_part,
                                  const Filter& filter, int coarse_level = 0);

/// Inverse of the proxy scaling: entry i estimates f at G_n^{-1}((i+1)/n).
Vec fitted_on_design_grid(const Pyramid& pyramid, const Filter& filter);

/// Off-grid prediction by linear interpolation of rank-grid fits over the
/// ordered design points; constant extrapolation beyond the sample range.
Vec interpolate_fit(const Vec& ordered_xs, const Vec& fitted, const Vec& at);

}  // namespace warpwave
