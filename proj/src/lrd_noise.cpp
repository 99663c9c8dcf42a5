#include "warpwave/lrd_noise.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

namespace warpwave {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t replication, StreamTag tag) {
  const auto t = static_cast<std::uint64_t>(tag);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replication),
                    static_cast<std::uint32_t>(replication >> 32),
                    static_cast<std::uint32_t>(t), 0x5eedu};
  return std::mt19937_64(seq);
}

LrdProcessSpec LrdProcessSpec::from_alpha(double alpha, std::uint64_t seed,
                                          Eigen::Index truncation) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw DomainError("alpha must lie in (0, 1], got " + std::to_string(alpha));
  if (truncation < 0) throw DomainError("truncation must be non-negative");
  return LrdProcessSpec(alpha, (1.0 - alpha) / 2.0, seed, truncation);
}

LrdProcessSpec LrdProcessSpec::from_d(double d, std::uint64_t seed, Eigen::Index truncation) {
  if (!(d >= 0.0 && d < 0.5))
    throw DomainError("d must lie in [0, 0.5), got " + std::to_string(d));
  if (truncation < 0) throw DomainError("truncation must be non-negative");
  return LrdProcessSpec(1.0 - 2.0 * d, d, seed, truncation);
}

Eigen::Index LrdProcessSpec::truncation_for(Eigen::Index n) const {
  if (truncation_ > 0) return truncation_;
  return std::max(kTruncationPerSample * n, kMinTruncation);
}

Vec farima_coefficients(double d, Eigen::Index count) {
  if (!(d >= 0.0 && d < 0.5))
    throw DomainError("fractional order d must lie in [0, 0.5), got " + std::to_string(d));
  if (count < 0) throw DomainError("coefficient count must be non-negative");
  Vec a(count + 1);
  a[0] = 1.0;
  for (Eigen::Index m = 1; m <= count; ++m)
    a[m] = a[m - 1] * (static_cast<double>(m - 1) + d) / static_cast<double>(m);
  return a;
}

namespace {

Eigen::Index next_pow2(Eigen::Index n) {
  Eigen::Index p = 1;
  while (p < n) p *= 2;
  return p;
}

}  // namespace

namespace {

// Innovations eta_{1-M} .. eta_n; the first M act as burn-in.
std::vector<double> draw_innovations(const LrdProcessSpec& spec, Eigen::Index count,
                                     std::uint64_t replication) {
  auto rng = make_stream(spec.seed(), replication, StreamTag::Noise);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> eta(static_cast<std::size_t>(count));
  for (auto& e : eta) e = normal(rng);
  return eta;
}

using Spectrum = std::vector<std::complex<double>>;

std::shared_ptr<const Spectrum> filter_spectrum(const Vec& a, double d, Eigen::Index size) {
  static std::mutex mutex;
  static std::map<std::tuple<std::uint64_t, Eigen::Index, Eigen::Index>,
                  std::shared_ptr<const Spectrum>>
      cache;
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  const auto key = std::make_tuple(bits, a.size(), size);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  std::vector<double> padded(static_cast<std::size_t>(size), 0.0);
  std::copy(a.begin(), a.end(), padded.begin());
  auto out = std::make_shared<Spectrum>();
  Eigen::FFT<double> fft;
  fft.fwd(*out, padded);
  std::lock_guard lock(mutex);
  if (cache.size() >= 32) cache.clear();
  cache.emplace(key, out);
  return out;
}

}  // namespace

LrdSeries generate_lrd(const LrdProcessSpec& spec, Eigen::Index n, std::uint64_t replication) {
  if (n < 1) throw DomainError("series length must be positive");
  const Eigen::Index trunc = spec.truncation_for(n);
  const Vec a = farima_coefficients(spec.d(), trunc);
  const std::vector<double> eta = draw_innovations(spec, n + trunc, replication);

  LrdSeries out{Vec(n), a.squaredNorm()};
  if (spec.d() == 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) out.values[i] = eta[static_cast<std::size_t>(trunc + i)];
    return out;
  }

  // Circular convolution of length >= n + M leaves outputs M..M+n-1 unwrapped.
  const Eigen::Index size = next_pow2(n + trunc);
  std::vector<double> padded_eta(static_cast<std::size_t>(size), 0.0);
  std::copy(eta.begin(), eta.end(), padded_eta.begin());

  Eigen::FFT<double> fft;
  Spectrum spec_eta;
  fft.fwd(spec_eta, padded_eta);
  const auto spec_a = filter_spectrum(a, spec.d(), size);
  for (std::size_t k = 0; k < spec_eta.size(); ++k) spec_eta[k] *= (*spec_a)[k];
  std::vector<double> conv;
  fft.inv(conv, spec_eta);
  for (Eigen::Index i = 0; i < n; ++i) out.values[i] = conv[static_cast<std::size_t>(trunc + i)];
  return out;
}

std::vector<double> lrd_partial_sums(const LrdProcessSpec& spec,
                                     std::span<const Eigen::Index> n_grid,
                                     std::uint64_t replication) {
  if (n_grid.empty()) return {};
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1 || (i > 0 && n_grid[i] <= n_grid[i - 1]))
      throw DomainError("n grid must be positive and strictly ascending");
  }
  const Eigen::Index n_max = n_grid.back();
  const Eigen::Index trunc = spec.truncation_for(n_max);
  const Vec a = farima_coefficients(spec.d(), trunc);
  const std::vector<double> eta = draw_innovations(spec, n_max + trunc, replication);

  // cum[j + 1] = a_0 + ... + a_j
  std::vector<double> cum(static_cast<std::size_t>(trunc + 2), 0.0);
  for (Eigen::Index j = 0; j <= trunc; ++j)
    cum[static_cast<std::size_t>(j + 1)] = cum[static_cast<std::size_t>(j)] + a[j];

  // eta[k] enters S_n with weight a_lo + ... + a_hi,
  // lo = max(0, M - k), hi = min(M, M + n - 1 - k).
  std::vector<double> out;
  out.reserve(n_grid.size());
  for (const Eigen::Index n : n_grid) {
    double total = 0.0;
    for (Eigen::Index k = 0; k < n + trunc; ++k) {
      const Eigen::Index lo = std::max<Eigen::Index>(0, trunc - k);
      const Eigen::Index hi = std::min(trunc, trunc + n - 1 - k);
      total += eta[static_cast<std::size_t>(k)] *
               (cum[static_cast<std::size_t>(hi + 1)] - cum[static_cast<std::size_t>(lo)]);
    }
    out.push_back(total);
  }
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("line fit needs >= 2 paired points");
  const auto m = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw DomainError("line fit abscissae are all equal");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

LineFit variance_scaling_probe(const LrdProcessSpec& spec,
                               std::span<const Eigen::Index> n_grid, int reps) {
  if (n_grid.size() < 4) throw DomainError("n grid needs at least 4 points");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1 || (i > 0 && n_grid[i] <= n_grid[i - 1]))
      throw DomainError("n grid must be positive and strictly ascending");
  }
  if (reps < 50) throw DomainError("variance probe needs at least 50 replications");

  const std::size_t points = n_grid.size();
  std::vector<double> sum(points, 0.0), sum_sq(points, 0.0);
  for (int r = 0; r < reps; ++r) {
    const auto partial = lrd_partial_sums(spec, n_grid, static_cast<std::uint64_t>(r));
    for (std::size_t k = 0; k < points; ++k) {
      sum[k] += partial[k];
      sum_sq[k] += partial[k] * partial[k];
    }
  }
  std::vector<double> log_n(points), log_var(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double mean = sum[k] / reps;
    const double var = (sum_sq[k] - reps * mean * mean) / (reps - 1);
    log_n[k] = std::log(static_cast<double>(n_grid[k]));
    log_var[k] = std::log(var);
  }
  return fit_line(log_n, log_var);
}

Vec periodogram(const Vec& series, Eigen::Index count) {
  const Eigen::Index n = series.size();
  if (count < 1 || count >= n / 2 + 1) throw DomainError("periodogram frequency count out of range");
  const double mean = series.mean();
  std::vector<double> centered(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) centered[static_cast<std::size_t>(i)] = series[i] - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, centered);
  Vec out(count);
  const double scale = 2.0 * M_PI * static_cast<double>(n);
  for (Eigen::Index j = 1; j <= count; ++j)
    out[j - 1] = std::norm(spectrum[static_cast<std::size_t>(j)]) / scale;
  return out;
}

double estimate_alpha(const Vec& series) {
  const Eigen::Index n = series.size();
  if (n < 256) throw DomainError("alpha estimation needs at least 256 observations");
  const double mean = series.mean();
  const double var = (series.array() - mean).square().mean();
  if (!(var > 1e-24 * std::max(1.0, mean * mean)))
    throw DomainError("series is constant; periodogram vanishes");

  const auto bandwidth = static_cast<Eigen::Index>(std::floor(std::sqrt(static_cast<double>(n))));
  const Vec pgram = periodogram(series, bandwidth);
  std::vector<double> x(static_cast<std::size_t>(bandwidth)), y(static_cast<std::size_t>(bandwidth));
  for (Eigen::Index j = 1; j <= bandwidth; ++j) {
    const double lambda = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n);
    const double s = 2.0 * std::sin(lambda / 2.0);
    if (!(pgram[j - 1] > 0.0)) throw DomainError("zero periodogram ordinate");
    x[static_cast<std::size_t>(j - 1)] = -std::log(s * s);
    y[static_cast<std::size_t>(j - 1)] = std::log(pgram[j - 1]);
  }
  const double d_hat = fit_line(x, y).slope;
  return std::clamp(1.0 - 2.0 * d_hat, 0.01, 1.0);
}

double sample_autocorrelation(const Vec& series, Eigen::Index lag) {
  const Eigen::Index n = series.size();
  if (lag < 0 || lag >= n) throw DomainError("lag out of range");
  const double mean = series.mean();
  double c0 = 0.0, ck = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) c0 += (series[i] - mean) * (series[i] - mean);
  for (Eigen::Index i = 0; i + lag < n; ++i)
    ck += (series[i] - mean) * (series[i + lag] - mean);
  if (c0 <= 0.0) throw DomainError("autocorrelation of a constant series");
  return ck / c0;
}

}  // namespace warpwave
