#pragma once

// Orthonormal periodized discrete wavelet transform.
//
// Filters are stored with the lowpass normalized to sum to sqrt(2) and the
// highpass obtained by the quadrature-mirror rule g_k = (-1)^k h_{L-1-k}.
// Analysis of a length-N block is
//   a_k = sum_m h_m x_{(2k+m) mod N},   d_k = sum_m g_m x_{(2k+m) mod N},
// and synthesis is its transpose, so the pyramid is an orthogonal map.

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "warpwave/errors.hpp"

namespace warpwave {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class FilterName { Haar, DB2, DB4, DB6 };

/// Accepts "haar", "db2", "db4", "db6" in any letter case.
FilterName parse_filter_name(std::string_view name);
std::string to_string(FilterName name);

template <typename Scalar = double>
struct WaveletFilter {
  FilterName name;
  Vector<Scalar> lowpass;
  Vector<Scalar> highpass;

  int taps() const { return static_cast<int>(lowpass.size()); }
  int vanishing_moments() const { return taps() / 2; }
};

namespace detail {

// Extremal-phase Daubechies reconstruction lowpass filters.
inline constexpr double kDb2[] = {0.48296291314453416, 0.8365163037378079,
                                  0.2241438680420134, -0.12940952255126037};
inline constexpr double kDb4[] = {
    0.2303778133088965,    0.7148465705529157,   0.6308807679298589,
    -0.027983769416859854, -0.18703481171909309, 0.030841381835560764,
    0.0328830116668852,    -0.010597401785069032};
inline constexpr double kDb6[] = {
    0.11154074335010947,  0.49462389039845306,   0.7511339080210954,
    0.31525035170919763,  -0.22626469396543983,  -0.12976686756726194,
    0.09750160558732304,  0.027522865530305727,  -0.03158203931748603,
    0.0005538422011614961, 0.004777257510945511, -0.0010773010853084796};

inline bool is_power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

inline int log2_exact(std::int64_t n) {
  int j = 0;
  while ((std::int64_t{1} << j) < n) ++j;
  return j;
}

}  // namespace detail

using detail::is_power_of_two;

template <typename Scalar = double>
WaveletFilter<Scalar> build_filter(FilterName name) {
  WaveletFilter<Scalar> f{name, {}, {}};
  auto load = [&f](const double* taps, int count) {
    f.lowpass.resize(count);
    for (int k = 0; k < count; ++k) f.lowpass[k] = static_cast<Scalar>(taps[k]);
  };
  switch (name) {
    case FilterName::Haar: {
      const Scalar r = Scalar(1) / std::sqrt(Scalar(2));
      f.lowpass.resize(2);
      f.lowpass << r, r;
      break;
    }
    case FilterName::DB2: load(detail::kDb2, 4); break;
    case FilterName::DB4: load(detail::kDb4, 8); break;
    case FilterName::DB6: load(detail::kDb6, 12); break;
    default: throw ConfigError("unsupported wavelet filter");
  }
  const int len = f.taps();
  f.highpass.resize(len);
  for (int k = 0; k < len; ++k) {
    const Scalar sign = (k % 2 == 0) ? Scalar(1) : Scalar(-1);
    f.highpass[k] = sign * f.lowpass[len - 1 - k];
  }
  return f;
}

template <typename Scalar = double>
WaveletFilter<Scalar> build_filter(std::string_view name) {
  return build_filter<Scalar>(parse_filter_name(name));
}

/// Scaling coefficients at `coarse_level` plus detail coefficients for every
/// level j in [coarse_level, fine_level]; level j holds 2^j values.
template <typename Scalar = double>
class CoefficientPyramid {
 public:
  CoefficientPyramid(int coarse_level, int fine_level)
      : coarse_level_(coarse_level), fine_level_(fine_level) {
    if (coarse_level < 0 || fine_level < coarse_level || fine_level > 40)
      throw ShapeError("pyramid levels must satisfy 0 <= coarse <= fine");
    scaling_ = Vector<Scalar>::Zero(Eigen::Index{1} << coarse_level);
    for (int j = coarse_level; j <= fine_level; ++j)
      details_.push_back(Vector<Scalar>::Zero(Eigen::Index{1} << j));
  }

  CoefficientPyramid(int coarse_level, Vector<Scalar> scaling,
                     std::vector<Vector<Scalar>> details)
      : coarse_level_(coarse_level),
        fine_level_(coarse_level + static_cast<int>(details.size()) - 1),
        scaling_(std::move(scaling)),
        details_(std::move(details)) {
    validate();
  }

  int coarse_level() const { return coarse_level_; }
  int fine_level() const { return fine_level_; }
  int num_detail_levels() const { return fine_level_ - coarse_level_ + 1; }

  /// Length of the signal this pyramid represents, 2^(fine_level + 1).
  Eigen::Index size() const { return Eigen::Index{1} << (fine_level_ + 1); }

  const Vector<Scalar>& scaling() const { return scaling_; }
  Vector<Scalar>& scaling() { return scaling_; }

  const Vector<Scalar>& detail(int level) const { return details_.at(index_of(level)); }
  Vector<Scalar>& detail(int level) { return details_.at(index_of(level)); }

  const std::vector<Vector<Scalar>>& details() const { return details_; }

  /// Scaling block first, then details from coarse to fine.
  Vector<Scalar> flatten() const {
    Vector<Scalar> out(size());
    Eigen::Index pos = 0;
    out.segment(pos, scaling_.size()) = scaling_;
    pos += scaling_.size();
    for (const auto& d : details_) {
      out.segment(pos, d.size()) = d;
      pos += d.size();
    }
    return out;
  }

  Scalar squared_norm() const {
    Scalar s = scaling_.squaredNorm();
    for (const auto& d : details_) s += d.squaredNorm();
    return s;
  }

  CoefficientPyramid& operator*=(Scalar c) {
    scaling_ *= c;
    for (auto& d : details_) d *= c;
    return *this;
  }

  void validate() const {
    if (coarse_level_ < 0 || details_.empty())
      throw ShapeError("pyramid must hold at least one detail level");
    if (scaling_.size() != (Eigen::Index{1} << coarse_level_))
      throw ShapeError("scaling block length must be 2^coarse_level");
    for (int j = coarse_level_; j <= fine_level_; ++j) {
      if (details_[static_cast<std::size_t>(j - coarse_level_)].size() !=
          (Eigen::Index{1} << j))
        throw ShapeError("detail level " + std::to_string(j) +
                         " must hold 2^" + std::to_string(j) + " coefficients");
    }
  }

  bool operator==(const CoefficientPyramid& other) const {
    return coarse_level_ == other.coarse_level_ &&
           fine_level_ == other.fine_level_ && scaling_ == other.scaling_ &&
           details_ == other.details_;
  }

 private:
  std::size_t index_of(int level) const {
    if (level < coarse_level_ || level > fine_level_)
      throw ShapeError("detail level " + std::to_string(level) + " not in pyramid");
    return static_cast<std::size_t>(level - coarse_level_);
  }

  int coarse_level_;
  int fine_level_;
  Vector<Scalar> scaling_;
  std::vector<Vector<Scalar>> details_;
};

namespace detail {

template <typename Scalar>
void analysis_step(const Vector<Scalar>& in, const WaveletFilter<Scalar>& f,
                   Vector<Scalar>& approx, Vector<Scalar>& det) {
  const Eigen::Index n = in.size();
  const Eigen::Index half = n / 2;
  const Eigen::Index mask = n - 1;
  const int taps = f.taps();
  approx.resize(half);
  det.resize(half);
  for (Eigen::Index k = 0; k < half; ++k) {
    Scalar a(0), d(0);
    for (int m = 0; m < taps; ++m) {
      const Scalar x = in[(2 * k + m) & mask];
      a += f.lowpass[m] * x;
      d += f.highpass[m] * x;
    }
    approx[k] = a;
    det[k] = d;
  }
}

template <typename Scalar>
Vector<Scalar> synthesis_step(const Vector<Scalar>& approx, const Vector<Scalar>& det,
                              const WaveletFilter<Scalar>& f) {
  const Eigen::Index half = approx.size();
  const Eigen::Index n = 2 * half;
  const Eigen::Index mask = n - 1;
  const int taps = f.taps();
  Vector<Scalar> out = Vector<Scalar>::Zero(n);
  for (Eigen::Index k = 0; k < half; ++k) {
    for (int m = 0; m < taps; ++m)
      out[(2 * k + m) & mask] += f.lowpass[m] * approx[k] + f.highpass[m] * det[k];
  }
  return out;
}

}  // namespace detail

/// Forward pyramid transform of a length-2^J signal down to `coarse_level`.
template <typename Scalar>
CoefficientPyramid<Scalar> dwt_forward(const Vector<Scalar>& signal,
                                       const WaveletFilter<Scalar>& filter,
                                       int coarse_level = 0) {
  const auto n = static_cast<std::int64_t>(signal.size());
  if (!is_power_of_two(n) || n < 2)
    throw ShapeError("signal length " + std::to_string(n) +
                     " is not a power of two >= 2");
  const int levels = detail::log2_exact(n);
  if (coarse_level < 0 || coarse_level >= levels)
    throw ShapeError("coarse level must lie in [0, log2(n))");

  std::vector<Vector<Scalar>> details(static_cast<std::size_t>(levels - coarse_level));
  Vector<Scalar> current = signal;
  Vector<Scalar> approx;
  for (int j = levels - 1; j >= coarse_level; --j) {
    detail::analysis_step(current, filter, approx,
                          details[static_cast<std::size_t>(j - coarse_level)]);
    current.swap(approx);
  }
  return CoefficientPyramid<Scalar>(coarse_level, std::move(current), std::move(details));
}

template <typename Scalar>
Vector<Scalar> dwt_inverse(const CoefficientPyramid<Scalar>& pyramid,
                           const WaveletFilter<Scalar>& filter) {
  pyramid.validate();
  Vector<Scalar> current = pyramid.scaling();
  for (int j = pyramid.coarse_level(); j <= pyramid.fine_level(); ++j)
    current = detail::synthesis_step(current, pyramid.detail(j), filter);
  return current;
}

/// Approximates ||psi||_p by synthesizing one detail coefficient on a grid of
/// 2^refinement_depth points and Riemann-summing |psi|^p.
template <typename Scalar>
Scalar wavelet_lp_norm(const WaveletFilter<Scalar>& filter, Scalar p,
                       int refinement_depth) {
  if (!(p >= Scalar(1))) throw DomainError("wavelet_lp_norm requires p >= 1");
  if (refinement_depth < 8 || refinement_depth > 26)
    throw DomainError("refinement depth must lie in [8, 26]");
  // Smallest level whose dilated support fits inside [0, 1) without wrapping.
  int level = 0;
  while ((1 << level) < filter.taps()) ++level;
  if (level >= refinement_depth) throw DomainError("refinement depth too shallow");

  CoefficientPyramid<Scalar> pyr(0, refinement_depth - 1);
  pyr.detail(level)[0] = Scalar(1);
  const Vector<Scalar> v = dwt_inverse(pyr, filter);
  const Scalar grid = static_cast<Scalar>(v.size());
  const Scalar moment = v.array().abs().pow(p).sum() * std::pow(grid, p / 2) / grid;
  const Scalar psi_pp = moment * std::pow(Scalar(2), -level * (p / 2 - 1));
  return std::pow(psi_pp, 1 / p);
}

}  // namespace warpwave
