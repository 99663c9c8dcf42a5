#include "warpwave/rates_besov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace warpwave {

namespace {

constexpr double kBoundaryTol = 1e-12;

bool near(double a, double b) {
  return std::abs(a - b) <= kBoundaryTol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

bool BesovIndices::in_theorem_scope() const { return s > std::max(1.0 / pi, 0.5); }

RateExponents rate_exponents(double s, double pi, double p) {
  if (!(pi >= 1.0)) throw DomainError("Besov index pi must be >= 1");
  if (!(p >= 2.0)) throw DomainError("loss exponent p must be >= 2");
  if (!(s > 0.0)) throw DomainError("smoothness s must be positive");
  const double sparse_den = 2.0 * (s - 1.0 / pi) + 1.0;
  if (!(sparse_den > 0.0))
    throw DomainError("sparse exponent denominator 2(s - 1/pi) + 1 is not positive");
  return {2.0 * s / (2.0 * s + 1.0), 2.0 * (s - (1.0 / pi - 1.0 / p)) / sparse_den};
}

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::Dense: return "dense";
    case Phase::Sparse: return "sparse";
    case Phase::Lrd: return "lrd";
    case Phase::Boundary: return "boundary";
  }
  return "unknown";
}

PhaseDiagnosis classify_phase(double s, double pi, double p, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  const RateExponents ex = rate_exponents(s, pi, p);
  PhaseDiagnosis out{Phase::Boundary, 0.0, 0.0, ex.alpha_dense, ex.alpha_sparse, {}};

  if (alpha <= std::min(ex.alpha_dense, ex.alpha_sparse)) {
    out.phase = Phase::Lrd;
    out.gamma = alpha;
    out.kappa = 1.0;
    return out;
  }
  const double split = (p - pi) / (2.0 * pi);
  if (near(s, split)) {
    // alpha_D == alpha_S on this line, so the exponent is unambiguous.
    out.phase = Phase::Boundary;
    out.gamma = ex.alpha_dense;
    out.note = "s equals (p - pi)/(2 pi): dense/sparse boundary";
  } else if (s > split) {
    out.phase = Phase::Dense;
    out.gamma = ex.alpha_dense;
  } else {
    out.phase = Phase::Sparse;
    out.gamma = ex.alpha_sparse;
    if (!(s > 1.0 / pi)) out.note = "s <= 1/pi: outside theorem scope";
  }
  out.kappa = p * out.gamma;
  return out;
}

double besov_seminorm(const Pyramid& pyramid, const BesovIndices& idx) {
  if (!(idx.pi > 0.0) || !(idx.r > 0.0)) throw DomainError("Besov indices pi and r must be positive");
  const bool sup_norm = std::isinf(idx.r);
  double acc = 0.0;
  for (int j = pyramid.coarse_level(); j <= pyramid.fine_level(); ++j) {
    const double level_norm =
        std::pow(pyramid.detail(j).array().abs().pow(idx.pi).sum(), 1.0 / idx.pi);
    const double term = std::pow(2.0, j * (idx.s + 0.5 - 1.0 / idx.pi)) * level_norm;
    if (sup_norm)
      acc = std::max(acc, term);
    else
      acc += std::pow(term, idx.r);
  }
  return sup_norm ? acc : std::pow(acc, 1.0 / idx.r);
}

double weak_lq_norm(const Pyramid& pyramid, double q, double p, double psi_p_norm) {
  if (!(q > 0.0) || !(p > 0.0)) throw DomainError("weak l_q norm needs q, p > 0");
  struct Atom {
    double magnitude;
    double mass;
  };
  std::vector<Atom> atoms;
  const double psi_pp = std::pow(psi_p_norm, p);
  for (int j = pyramid.coarse_level(); j <= pyramid.fine_level(); ++j) {
    const double mass = std::pow(2.0, j * (p / 2.0 - 1.0)) * psi_pp;
    for (double b : pyramid.detail(j))
      if (b != 0.0) atoms.push_back({std::abs(b), mass});
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.magnitude > b.magnitude; });
  // Just below each distinct magnitude the level set holds every atom at
  // least that large; the supremum is attained at one of these points.
  double best = 0.0, cumulative = 0.0;
  for (std::size_t i = 0; i < atoms.size();) {
    std::size_t k = i;
    while (k < atoms.size() && atoms[k].magnitude == atoms[i].magnitude) cumulative += atoms[k++].mass;
    best = std::max(best, std::pow(atoms[i].magnitude, q) * cumulative);
    i = k;
  }
  return best;
}

double strong_lq_norm(const Pyramid& pyramid, double q, double p, double psi_p_norm) {
  if (!(q > 0.0) || !(p > 0.0)) throw DomainError("l_q norm needs q, p > 0");
  const double psi_pp = std::pow(psi_p_norm, p);
  double acc = 0.0;
  for (int j = pyramid.coarse_level(); j <= pyramid.fine_level(); ++j)
    acc += pyramid.detail(j).array().abs().pow(q).sum() * std::pow(2.0, j * (p / 2.0 - 1.0)) * psi_pp;
  return std::pow(acc, 1.0 / q);
}

EmbeddingReport embedding_check(const Pyramid& pyramid, const BesovIndices& idx, double p,
                                double psi_p_norm) {
  if (!(p > 0.0)) throw DomainError("embedding check needs p > 0");
  if (!(idx.s >= 0.0)) throw DomainError("embedding check needs s >= 0");
  const double q_dense = p / (2.0 * idx.s + 1.0);
  const double sparse_floor = 2.0 / (2.0 * idx.s + 1.0);
  if (!(idx.pi > sparse_floor))
    throw DomainError("embedding needs pi > 2/(2s+1); got pi = " + std::to_string(idx.pi) +
                      " <= " + std::to_string(sparse_floor));

  EmbeddingReport rep{};
  const double besov = besov_seminorm(pyramid, {idx.s, idx.pi, std::numeric_limits<double>::infinity()});
  if (near(idx.pi, q_dense)) {
    rep.regime = "critical";
    rep.q = idx.pi;
    rep.sequence_norm = std::pow(strong_lq_norm(pyramid, rep.q, p, psi_p_norm), rep.q);
  } else if (idx.pi > q_dense) {
    rep.regime = "dense";
    rep.q = q_dense;
    rep.sequence_norm = weak_lq_norm(pyramid, rep.q, p, psi_p_norm);
  } else {
    const double den = idx.s + 0.5 - 1.0 / idx.pi;
    if (!(p > 2.0) || !(den > 0.0))
      throw DomainError("sparse embedding needs p > 2 and s + 1/2 - 1/pi > 0");
    rep.regime = "sparse";
    rep.q = (p / 2.0 - 1.0) / den;
    rep.sequence_norm = weak_lq_norm(pyramid, rep.q, p, psi_p_norm);
  }
  rep.besov_scale = std::pow(besov, rep.q);
  rep.ratio = rep.besov_scale > 0.0 ? rep.sequence_norm / rep.besov_scale : 0.0;
  rep.finite = std::isfinite(rep.ratio);
  return rep;
}

double theoretical_risk(double n, const PhaseDiagnosis& diag, double p) {
  if (!(n >= 2.0)) throw DomainError("theoretical risk needs n >= 2");
  return std::pow(n, -(p / 2.0) * diag.gamma) * std::pow(std::log(n), diag.kappa);
}

}  // namespace warpwave
