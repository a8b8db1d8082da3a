#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "covert/channel.hpp"
#include "covert/divergence.hpp"
#include "covert/errors.hpp"
#include "covert/numeric.hpp"

namespace covert {

// Weight schedule omega_n: must vanish while omega_n * sqrt(n) grows, which
// pins the active-symbol count between o(n) and omega(1). The power schedule
// exposes the exponent as a knob; the symbolic limit of log(1/omega_n)/log(n)
// feeds the support-revealing scaling constant.
struct OmegaSchedule {
  enum class Kind { InvLog, LogOverSqrt, Power };

  Kind kind = Kind::InvLog;
  double eps = 0.25;  // only for Kind::Power, in ]0, 1/2[

  static OmegaSchedule inv_log() { return {Kind::InvLog, 0.0}; }
  static OmegaSchedule log_over_sqrt() { return {Kind::LogOverSqrt, 0.0}; }
  static OmegaSchedule power(double e) {
    if (!(e > 0.0 && e < 0.5)) throw ConfigError("power schedule exponent outside ]0, 1/2[");
    return {Kind::Power, e};
  }

  static OmegaSchedule parse(const std::string& name, double e = 0.25) {
    if (name == "inv_log") return inv_log();
    if (name == "log_over_sqrt") return log_over_sqrt();
    if (name == "power") return power(e);
    throw ConfigError("unknown omega schedule kind: " + name);
  }

  double value(uint64_t n) const {
    if (n < 3) throw ConfigError("blocklength must be >= 3");
    const double nn = double(n);
    switch (kind) {
      case Kind::InvLog:
        return 1.0 / std::log(nn);
      case Kind::LogOverSqrt:
        return std::log(nn) / std::sqrt(nn);
      case Kind::Power:
        return std::pow(nn, eps - 0.5);
    }
    throw ConfigError("unknown omega schedule kind");
  }

  // lim log(1/omega_n) / log(n)
  double inverse_log_limit() const {
    switch (kind) {
      case Kind::InvLog:
        return 0.0;  // log log n / log n
      case Kind::LogOverSqrt:
        return 0.5;  // (log sqrt(n) - log log n) / log n
      case Kind::Power:
        return 0.5 - eps;
    }
    throw ConfigError("unknown omega schedule kind");
  }

  std::string name() const {
    switch (kind) {
      case Kind::InvLog:
        return "inv_log";
      case Kind::LogOverSqrt:
        return "log_over_sqrt";
      case Kind::Power:
        return "power";
    }
    return "?";
  }
};

inline double omega_schedule(const OmegaSchedule& schedule, uint64_t n) {
  return schedule.value(n);
}

// Full parameter pack of a designed covert code. The slack constants live in
// ]0,1[; gamma and tau are the decoder and resolvability thresholds in nats.
struct CovertParameters {
  uint64_t n = 0;
  OmegaSchedule schedule;
  double omega_n = 0.0;
  double alpha_n = 0.0;  // omega_n / sqrt(n)
  double beta_n = 0.0;   // alpha_n / 2, spread-spectrum modulation only
  double xi = 0.5;
  double mu = 0.1;
  double nu = 0.1;
  double delta = 0.1;
  double epsilon = 0.1;
  double gamma = 0.0;  // decoder threshold (nats)
  double tau = 0.0;    // resolvability threshold (nats)
  double log_m = 0.0;  // nats
  double log_k = 0.0;  // nats
  double m_codewords = 1.0;   // ceil(exp(log_m))
  double k_codebooks = 1.0;   // max(1, ceil(exp(log_k)))
};

// n * D(Q_alpha || Q0): the covertness budget of the target product process.
inline double covertness_budget(uint64_t n, double alpha_n, const FiniteDistribution& q1,
                                const FiniteDistribution& q0) {
  return double(n) * mixture_divergence_exact(alpha_n, q1, q0);
}

inline double covertness_budget(const CovertParameters& params, const ChannelPair& pair) {
  return covertness_budget(params.n, params.alpha_n, pair.q1, pair.q0);
}

// Gaussian side: single-letter KL of the two-component normal mixture against
// the innocent normal, by adaptive quadrature.
inline double gaussian_mixture_divergence(double alpha, double x1, double sigma) {
  if (alpha == 0.0) return 0.0;
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  const auto q0 = [&](double z) { return std::exp(-z * z * inv2s2); };
  const auto q1 = [&](double z) { return std::exp(-(z - x1) * (z - x1) * inv2s2); };
  // densities without the common 1/(sigma sqrt(2 pi)) factor: it cancels in
  // the log and scales the integral uniformly.
  const auto integrand = [&](double z) {
    const double a = q0(z), b = q1(z);
    const double qa = (1.0 - alpha) * a + alpha * b;
    if (qa <= 0.0 || a <= 0.0) return 0.0;
    return qa * std::log1p(alpha * (b - a) / a);
  };
  const double lo = std::min(0.0, x1) - 12.0 * sigma;
  const double hi = std::max(0.0, x1) + 12.0 * sigma;
  const double scale = alpha * alpha * 0.5 * std::expm1(x1 * x1 / (sigma * sigma));
  const double tol = std::max(1e-300, scale * 1e-9);
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * 3.14159265358979323846));
  return norm * integrate(integrand, lo, hi, tol / norm);
}

inline double covertness_budget(uint64_t n, double alpha_n, const GaussianPair& g) {
  return double(n) * gaussian_mixture_divergence(alpha_n, g.x1, g.sigma_warden);
}

// Inverts alpha -> n*D(Q_alpha||Q0) for a target budget. The map is monotone
// on [0, 1], so bisection on ]1e-12, 0.5] is derivative-free and safe.
inline double solve_alpha_for_budget(const ChannelPair& pair, uint64_t n, double delta_target) {
  if (!(delta_target > 0.0)) throw ConfigError("target budget must be positive");
  if (!pair.q1_ac_q0) throw InfeasibleError("Q1 not absolutely continuous w.r.t. Q0");
  if (pair.q1_eq_q0) throw InfeasibleError("Q1 equals Q0: budget unreachable");
  const auto budget = [&](double a) { return covertness_budget(n, a, pair.q1, pair.q0); };
  double lo = 1e-12, hi = 0.5;
  if (budget(hi) < delta_target)
    throw InfeasibleError("target budget unreachable with alpha <= 0.5");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (budget(mid) < delta_target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if ((hi - lo) <= 1e-15 * hi) break;
  }
  return 0.5 * (lo + hi);
}

// Limits of log M and log M + log K scaled by sqrt(n * budget), and the
// matching converse ceilings. Units: dimensionless ratios.
struct AsymptoticConstants {
  double msg_const = 0.0;             // (1-xi) sqrt(2/chi2) D(P1||P0)
  double key_const = 0.0;             // sqrt(2/chi2) [(1+xi)D(Q1||Q0) - (1-xi)D(P1||P0)]^+
  double converse_msg_ceiling = 0.0;  // sqrt(2/chi2) D(P1||P0)
  double converse_sum_floor = 0.0;    // sqrt(2/chi2) D(Q1||Q0)
};

namespace detail {

inline AsymptoticConstants scaling_constants(double xi, double chi2, double d_main,
                                             double d_warden) {
  if (!(xi > 0.0 && xi < 1.0)) throw ConfigError("xi outside ]0, 1[");
  if (!(chi2 > 0.0)) throw InfeasibleError("warden chi-square divergence is zero");
  const double root = std::sqrt(2.0 / chi2);
  AsymptoticConstants c;
  c.msg_const = (1.0 - xi) * root * d_main;
  c.key_const = root * std::max(0.0, (1.0 + xi) * d_warden - (1.0 - xi) * d_main);
  c.converse_msg_ceiling = root * d_main;
  c.converse_sum_floor = root * d_warden;
  return c;
}

}  // namespace detail

inline AsymptoticConstants asymptotic_constants(const ChannelPair& pair, double xi = 0.5) {
  pair.require_standing_assumptions();
  return detail::scaling_constants(xi, chi_k(pair.q1, pair.q0, 2), kl(pair.p1, pair.p0),
                                   kl(pair.q1, pair.q0));
}

// Multi-symbol extension: chi2 is taken on the weight-averaged active warden
// row, the KL numerators become weighted averages.
inline AsymptoticConstants multi_symbol_constants(const MultiSymbolChannel& ch, double xi = 0.5) {
  NeumaierSum d_main, d_warden;
  for (const auto& s : ch.symbols) {
    if (!s.p.absolutely_continuous_wrt(ch.p0))
      throw InfeasibleError("P_i not absolutely continuous w.r.t. P0");
    if (!s.q.absolutely_continuous_wrt(ch.q0))
      throw InfeasibleError("Q_i not absolutely continuous w.r.t. Q0");
    d_main.add(s.weight * kl(s.p, ch.p0));
    d_warden.add(s.weight * kl(s.q, ch.q0));
  }
  const FiniteDistribution mean_q = ch.mean_active_warden_row();
  if (mean_q == ch.q0)
    throw InfeasibleError("averaged active row equals Q0: warden side is degenerate");
  return detail::scaling_constants(xi, chi_k(mean_q, ch.q0, 2), d_main.value(), d_warden.value());
}

// Theta-class of the optimal log M / log K scaling, per the absolute
// continuity pattern of the four rows.
enum class ScalingLaw { Zero, SqrtN, SqrtNLogN, LinearN };

struct ScalingClass {
  ScalingLaw log_m = ScalingLaw::Zero;
  ScalingLaw log_k = ScalingLaw::Zero;
  bool vanishing = false;
};

inline ScalingClass scaling_class(const ChannelPair& pair, bool vanishing) {
  ScalingClass c;
  c.vanishing = vanishing;
  const bool p1_eq_p0 = (pair.p1 == pair.p0);
  if (pair.q1_eq_q0) {
    c.log_m = p1_eq_p0 ? ScalingLaw::Zero : ScalingLaw::LinearN;
    c.log_k = ScalingLaw::Zero;
  } else if (!pair.q1_ac_q0) {
    c.log_m = ScalingLaw::Zero;
    c.log_k = ScalingLaw::Zero;
  } else if (p1_eq_p0) {
    c.log_m = ScalingLaw::Zero;
    c.log_k = ScalingLaw::Zero;
  } else if (pair.p1_ac_p0) {
    c.log_m = ScalingLaw::SqrtN;
    c.log_k = ScalingLaw::SqrtN;
  } else {
    c.log_m = ScalingLaw::SqrtNLogN;
    c.log_k = ScalingLaw::Zero;
  }
  return c;
}

inline std::string scaling_law_label(ScalingLaw law, bool vanishing) {
  // With a vanishing budget the sqrt(n) laws carry the omega_n factor.
  const std::string root = vanishing ? "omega_n*sqrt(n)" : "sqrt(n)";
  switch (law) {
    case ScalingLaw::Zero:
      return "0";
    case ScalingLaw::SqrtN:
      return "Theta(" + root + ")";
    case ScalingLaw::SqrtNLogN:
      return "Theta(" + root + "*log(n))";
    case ScalingLaw::LinearN:
      return "Theta(n)";
  }
  return "?";
}

// Keyless scaling constant on a support-revealing main channel (kappa > 0):
// (1-xi) * kappa * sqrt(2/chi2) * (1/2 + lim log(1/omega_n)/log(n)).
inline double support_reveal_constant(const ChannelPair& pair, const OmegaSchedule& schedule,
                                      double xi = 0.5) {
  if (pair.kappa == 0.0) throw InfeasibleError("main channel does not reveal x1 (kappa = 0)");
  if (!pair.q1_ac_q0) throw InfeasibleError("Q1 not absolutely continuous w.r.t. Q0");
  if (pair.q1_eq_q0) throw InfeasibleError("Q1 equals Q0: warden side is degenerate");
  const double chi2 = chi_k(pair.q1, pair.q0, 2);
  return (1.0 - xi) * pair.kappa * std::sqrt(2.0 / chi2) *
         (0.5 + schedule.inverse_log_limit());
}

// Slack tuple mu = nu = delta = t consistent with a given aggregate xi, i.e.
// the root of 3t + t^3 = xi on ]0, 1[.
inline double xi_consistent_slack(double xi) {
  if (!(xi > 0.0 && xi < 1.0)) throw ConfigError("xi outside ]0, 1[");
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double t = 0.5 * (lo + hi);
    if (3.0 * t + t * t * t < xi) {
      lo = t;
    } else {
      hi = t;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace covert
