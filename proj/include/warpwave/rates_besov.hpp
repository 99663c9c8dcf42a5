#pragma once

// Rate exponents and phase classification for L^p risk under long-range
// dependence, plus Besov and weak-l_q functionals of coefficient pyramids.

#include <string>

#include "warpwave/design_warp.hpp"

namespace warpwave {

struct BesovIndices {
  double s;
  double pi;
  double r;

  /// s > max(1/pi, 1/2); outside this range results are reported but flagged.
  bool in_theorem_scope() const;
};

struct RateExponents {
  double alpha_dense;   ///< 2s / (2s + 1)
  double alpha_sparse;  ///< 2(s - 1/pi + 1/p) / (2(s - 1/pi) + 1)
};

RateExponents rate_exponents(double s, double pi, double p);

enum class Phase { Dense, Sparse, Lrd, Boundary };
std::string to_string(Phase phase);

struct PhaseDiagnosis {
  Phase phase;
  double gamma;
  double kappa;
  double alpha_dense;
  double alpha_sparse;
  /// Set when the indices sit on the dense/sparse line s = (p - pi) / (2 pi).
  std::string note;
};

/// LRD when alpha <= min(alpha_S, alpha_D); otherwise dense for
/// s > (p - pi)/(2 pi), sparse below it, Boundary on the line itself.
PhaseDiagnosis classify_phase(double s, double pi, double p, double alpha);

/// ( sum_j [ 2^{j(s + 1/2 - 1/pi)} ||beta_j.||_pi ]^r )^{1/r} over detail
/// levels; r = infinity gives the supremum.
double besov_seminorm(const Pyramid& pyramid, const BesovIndices& idx);

/// sup_{lambda > 0} lambda^q mu{(j,k) : |beta_jk| > lambda} with
/// mu{(j,k)} = 2^{j(p/2 - 1)} psi_p_norm^p, over detail coefficients.
double weak_lq_norm(const Pyramid& pyramid, double q, double p, double psi_p_norm);

/// (sum_jk |beta_jk|^q mu{(j,k)})^{1/q}
double strong_lq_norm(const Pyramid& pyramid, double q, double p, double psi_p_norm);

struct EmbeddingReport {
  std::string regime;  ///< "dense" (pi > q_D), "critical" (pi = q_D) or "sparse"
  double q;            ///< exponent of the sequence-space norm used
  double sequence_norm;
  double besov_scale;  ///< B^s_{pi,inf} seminorm raised to the power q
  double ratio;
  bool finite;
};

EmbeddingReport embedding_check(const Pyramid& pyramid, const BesovIndices& idx, double p,
                                double psi_p_norm);

/// n^{-(p/2) gamma} (ln n)^kappa with unit constant.
double theoretical_risk(double n, const PhaseDiagnosis& diag, double p);

}  // namespace warpwave
