#include "warpwave/design_warp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace warpwave {

void RegressionSample::validate(bool require_unit_support) const {
  if (xs.size() != ys.size())
    throw ShapeError("design and response lengths differ (" +
                     std::to_string(xs.size()) + " vs " + std::to_string(ys.size()) + ")");
  if (xs.size() == 0) throw ShapeError("empty sample");
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]))
      throw DomainError("design point " + std::to_string(i) + " is not finite");
    if (require_unit_support && (xs[i] < 0.0 || xs[i] > 1.0))
      throw DomainError("design point " + std::to_string(i) + " outside [0,1]");
  }
}

EmpiricalCdf::EmpiricalCdf(Vec xs) : sorted_(std::move(xs)) {
  if (sorted_.size() == 0) throw ShapeError("empirical cdf of an empty sample");
  for (Eigen::Index i = 0; i < sorted_.size(); ++i)
    if (!std::isfinite(sorted_[i])) throw DomainError("non-finite design point");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
  const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(count) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::order_statistic(Eigen::Index i) const {
  if (i < 1 || i > sorted_.size()) throw ShapeError("order statistic index out of range");
  return sorted_[i - 1];
}

EmpiricalCdf empirical_cdf(const Vec& xs) { return EmpiricalCdf(xs); }

OrderedPairs order_pairs(const RegressionSample& sample) {
  sample.validate();
  const Eigen::Index n = sample.size();
  OrderedPairs out;
  out.permutation.resize(static_cast<std::size_t>(n));
  std::iota(out.permutation.begin(), out.permutation.end(), Eigen::Index{0});
  std::stable_sort(out.permutation.begin(), out.permutation.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return sample.xs[a] < sample.xs[b]; });
  out.ordered_xs.resize(n);
  out.ordered_ys.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto src = out.permutation[static_cast<std::size_t>(i)];
    out.ordered_xs[i] = sample.xs[src];
    out.ordered_ys[i] = sample.ys[src];
  }
  return out;
}

OrderedPairs thin_to_power_of_two(const OrderedPairs& ordered) {
  const Eigen::Index n = ordered.ordered_ys.size();
  if (n < 2) throw ShapeError("need at least two observations");
  Eigen::Index m = 1;
  while (2 * m <= n) m *= 2;
  if (m == n) return ordered;
  OrderedPairs out;
  out.ordered_xs.resize(m);
  out.ordered_ys.resize(m);
  out.permutation.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index src = i * n / m;
    out.ordered_xs[i] = ordered.ordered_xs[src];
    out.ordered_ys[i] = ordered.ordered_ys[src];
    out.permutation[static_cast<std::size_t>(i)] =
        ordered.permutation[static_cast<std::size_t>(src)];
  }
  return out;
}

Pyramid proxy_coefficients(const Vec& ordered_ys, const Filter& filter, int coarse_level) {
  Pyramid pyr = dwt_forward(ordered_ys, filter, coarse_level);
  pyr *= 1.0 / std::sqrt(static_cast<double>(ordered_ys.size()));
  return pyr;
}

Pyramid empirical_coefficients(const RegressionSample& sample, const Filter& filter,
                               int coarse_level, LengthMode mode) {
  OrderedPairs ordered = order_pairs(sample);
  if (!is_power_of_two(sample.size())) {
    if (mode == LengthMode::Strict)
      throw ShapeError("sample size " + std::to_string(sample.size()) +
                       " is not a power of two");
    ordered = thin_to_power_of_two(ordered);
  }
  return proxy_coefficients(ordered.ordered_ys, filter, coarse_level);
}

Pyramid split_sample_coefficients(const RegressionSample& cdf_part,
                                  const RegressionSample& coef_part,
                                  const Filter& filter, int coarse_level) {
  cdf_part.validate();
  coef_part.validate();
  const Eigen::Index n = coef_part.size();
  if (cdf_part.size() != n || !is_power_of_two(n))
    throw ShapeError("split halves must share one power-of-two size");
  const EmpiricalCdf cdf(cdf_part.xs);
  Vec binned = Vec::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = cdf(coef_part.xs[i]);
    auto cell = static_cast<Eigen::Index>(std::ceil(u * static_cast<double>(n))) - 1;
    cell = std::clamp<Eigen::Index>(cell, 0, n - 1);
    binned[cell] += coef_part.ys[i];
  }
  return proxy_coefficients(binned, filter, coarse_level);
}

Vec fitted_on_design_grid(const Pyramid& pyramid, const Filter& filter) {
  Vec out = dwt_inverse(pyramid, filter);
  out *= std::sqrt(static_cast<double>(out.size()));
  return out;
}

Vec interpolate_fit(const Vec& ordered_xs, const Vec& fitted, const Vec& at) {
  if (ordered_xs.size() != fitted.size() || fitted.size() == 0)
    throw ShapeError("design and fitted lengths differ");
  const Eigen::Index n = fitted.size();
  Vec out(at.size());
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    const double x = at[i];
    const auto hi = std::upper_bound(ordered_xs.begin(), ordered_xs.end(), x) - ordered_xs.begin();
    if (hi == 0) {
      out[i] = fitted[0];
    } else if (hi >= n) {
      out[i] = fitted[n - 1];
    } else {
      const double x0 = ordered_xs[hi - 1], x1 = ordered_xs[hi];
      const double w = (x1 > x0) ? (x - x0) / (x1 - x0) : 0.0;
      out[i] = (1.0 - w) * fitted[hi - 1] + w * fitted[hi];
    }
  }
  return out;
}

}  // namespace warpwave
