#pragma once

#include <cmath>

#include "covert/distribution.hpp"
#include "covert/errors.hpp"
#include "covert/numeric.hpp"

namespace covert {

// All divergences are in nats. Convention: 0*log(0/q) = 0; p*log(p/0) with
// p > 0 yields +infinity so callers can branch on the sentinel.

inline double kl(const FiniteDistribution& p, const FiniteDistribution& q) {
  if (p.size() != q.size()) throw ConfigError("alphabet size mismatch");
  NeumaierSum s;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInf;
    s.add(p[i] * std::log(p[i] / q[i]));
  }
  return s.value();
}

inline double tv(const FiniteDistribution& p, const FiniteDistribution& q) {
  if (p.size() != q.size()) throw ConfigError("alphabet size mismatch");
  NeumaierSum s;
  for (size_t i = 0; i < p.size(); ++i) s.add(std::abs(p[i] - q[i]));
  return 0.5 * s.value();
}

namespace detail {

inline void require_ac(const FiniteDistribution& q1, const FiniteDistribution& q0) {
  if (!q1.absolutely_continuous_wrt(q0))
    throw InfeasibleError("Q1 not absolutely continuous w.r.t. Q0");
}

}  // namespace detail

// Centered power sum sum_z (Q1-Q0)^k / Q0^(k-1) over the support of Q0.
// k = 2 is the chi-square divergence; k up to 4 feeds the mixture-divergence
// bounds, higher k allowed for exploration.
inline double chi_k(const FiniteDistribution& q1, const FiniteDistribution& q0, int k) {
  detail::require_ac(q1, q0);
  if (k < 2 || k > 8) throw ConfigError("chi_k order must be in [2, 8]");
  NeumaierSum s;
  for (size_t z = 0; z < q0.size(); ++z) {
    if (q0[z] == 0.0) continue;
    const double d = q1[z] - q0[z];
    s.add(std::pow(d, k) / std::pow(q0[z], k - 1));
  }
  return s.value();
}

// As chi_k but restricted to letters where Q1(z) < Q0(z).
inline double eta_k(const FiniteDistribution& q1, const FiniteDistribution& q0, int k) {
  detail::require_ac(q1, q0);
  if (k < 2 || k > 8) throw ConfigError("eta_k order must be in [2, 8]");
  NeumaierSum s;
  for (size_t z = 0; z < q0.size(); ++z) {
    if (q0[z] == 0.0) continue;
    const double d = q1[z] - q0[z];
    if (d < 0.0) s.add(std::pow(d, k) / std::pow(q0[z], k - 1));
  }
  return s.value();
}

// Exact D(Q_alpha || Q0) for the mixture Q_alpha = alpha*Q1 + (1-alpha)*Q0.
inline double mixture_divergence_exact(double alpha, const FiniteDistribution& q1,
                                       const FiniteDistribution& q0) {
  detail::require_ac(q1, q0);
  if (alpha < 0.0 || alpha > 1.0) throw ConfigError("alpha outside [0, 1]");
  NeumaierSum s;
  for (size_t z = 0; z < q0.size(); ++z) {
    const double qa = alpha * q1[z] + (1.0 - alpha) * q0[z];
    if (qa == 0.0) continue;
    // log1p keeps precision when alpha*(Q1-Q0) is tiny relative to Q0.
    s.add(qa * std::log1p(alpha * (q1[z] - q0[z]) / q0[z]));
  }
  return s.value();
}

// Fourth-order polynomial bracket for D(Q_alpha || Q0), plus the
// (alpha^2/2)*chi2*(1 +/- sqrt(alpha)) loosening. The lower bound requires
// alpha*(Q0(z) - Q1(z)) <= Q0(z)/2 on every letter; `lower_valid` reports
// whether that holds so callers never consume an unsound bound.
struct MixtureDivergenceBounds {
  double alpha = 0.0;
  double upper = 0.0;
  double lower = 0.0;
  bool lower_valid = false;
  double loose_upper = 0.0;
  double loose_lower = 0.0;
};

inline MixtureDivergenceBounds mixture_divergence_bounds(double alpha,
                                                         const FiniteDistribution& q1,
                                                         const FiniteDistribution& q0) {
  detail::require_ac(q1, q0);
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha outside ]0, 1[");
  const double x2 = chi_k(q1, q0, 2);
  const double x3 = chi_k(q1, q0, 3);
  const double x4 = chi_k(q1, q0, 4);
  const double e3 = eta_k(q1, q0, 3);
  const double e4 = eta_k(q1, q0, 4);
  const double a2 = alpha * alpha, a3 = a2 * alpha, a4 = a3 * alpha;

  MixtureDivergenceBounds b;
  b.alpha = alpha;
  b.upper = a2 / 2.0 * x2 - a3 / 6.0 * x3 + a4 / 3.0 * x4;
  b.lower = a2 / 2.0 * x2 - a3 * (x3 / 2.0 - 2.0 / 3.0 * e3) + 2.0 * a4 / 3.0 * e4;
  b.lower_valid = true;
  for (size_t z = 0; z < q0.size(); ++z) {
    if (q0[z] > 0.0 && alpha * (q0[z] - q1[z]) > q0[z] / 2.0) {
      b.lower_valid = false;
      break;
    }
  }
  const double leading = a2 / 2.0 * x2;
  b.loose_upper = leading * (1.0 + std::sqrt(alpha));
  b.loose_lower = leading * (1.0 - std::sqrt(alpha));
  return b;
}

// I(X;Z) for X ~ Bernoulli(alpha) on {x0,x1} driving rows (Q0, Q1), computed
// as (1-alpha)D(Q0||Q_alpha) + alpha*D(Q1||Q_alpha). The algebraic identity
// I = alpha*D(Q1||Q0) - D(Q_alpha||Q0) gives an independent cross-check.
inline double mutual_info_binary(double alpha, const FiniteDistribution& q1,
                                 const FiniteDistribution& q0) {
  detail::require_ac(q1, q0);
  if (alpha < 0.0 || alpha > 1.0) throw ConfigError("alpha outside [0, 1]");
  if (alpha == 0.0 || alpha == 1.0) return 0.0;
  const FiniteDistribution qa = mix(alpha, q1, q0);
  return (1.0 - alpha) * kl(q0, qa) + alpha * kl(q1, qa);
}

inline double kl_bernoulli(double a, double b) {
  return kl(FiniteDistribution::bernoulli(a), FiniteDistribution::bernoulli(b));
}

// Jensen-Shannon divergence between Bernoulli(a) and Bernoulli(b), in nats.
// Ranges over [0, ln 2]; 0 iff a == b, ln 2 iff {a,b} = {0,1}.
inline double jensen_shannon_binary(double a, double b) {
  if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0)
    throw ConfigError("Bernoulli parameter outside [0, 1]");
  const double m = 0.5 * (a + b);
  return 0.5 * kl_bernoulli(a, m) + 0.5 * kl_bernoulli(b, m);
}

}  // namespace covert
