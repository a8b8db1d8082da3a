#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "covert/distribution.hpp"
#include "covert/divergence.hpp"
#include "covert/errors.hpp"
#include "covert/numeric.hpp"

namespace covert {

// A binary-input covert channel: the innocent symbol x0 and the active symbol
// x1 seen through the legitimate channel (rows P0, P1) and the warden's
// channel (rows Q0, Q1), with the derived scalars the analysis runs on.
// Immutable after construction.
struct ChannelPair {
  std::vector<std::string> output_alphabet_main;
  std::vector<std::string> output_alphabet_warden;
  FiniteDistribution p0, p1;  // main channel rows for x0, x1
  FiniteDistribution q0, q1;  // warden channel rows for x0, x1

  double mu0 = 0.0;    // min positive mass of Q0
  double zeta = kInf;  // sum_y P1(y)^2 / P0(y); +inf when P1 is not AC w.r.t. P0
  double kappa = 0.0;  // P1-mass on outputs impossible under x0
  bool p1_ac_p0 = false;
  bool q1_ac_q0 = false;
  bool q1_eq_q0 = false;

  ChannelPair(FiniteDistribution p0_, FiniteDistribution p1_, FiniteDistribution q0_,
              FiniteDistribution q1_, std::vector<std::string> alpha_main = {},
              std::vector<std::string> alpha_warden = {})
      : output_alphabet_main(std::move(alpha_main)),
        output_alphabet_warden(std::move(alpha_warden)),
        p0(std::move(p0_)),
        p1(std::move(p1_)),
        q0(std::move(q0_)),
        q1(std::move(q1_)) {
    mu0 = q0.min_positive_mass();
    p1_ac_p0 = p1.absolutely_continuous_wrt(p0);
    q1_ac_q0 = q1.absolutely_continuous_wrt(q0);
    q1_eq_q0 = (q1 == q0);
    NeumaierSum z, k;
    for (size_t y = 0; y < p0.size(); ++y) {
      if (p0[y] > 0.0) {
        z.add(p1[y] * p1[y] / p0[y]);
      } else if (p1[y] > 0.0) {
        k.add(p1[y]);
      }
    }
    kappa = k.value();
    zeta = p1_ac_p0 ? z.value() : kInf;
  }

  static ChannelPair bsc(double p_main, double p_warden) {
    return ChannelPair(FiniteDistribution::bernoulli(p_main),
                       FiniteDistribution::bernoulli(1.0 - p_main),
                       FiniteDistribution::bernoulli(p_warden),
                       FiniteDistribution::bernoulli(1.0 - p_warden), {"0", "1"}, {"0", "1"});
  }

  // The standing assumptions of the sqrt(n) schemes.
  void require_standing_assumptions() const {
    if (!p1_ac_p0) throw InfeasibleError("P1 not absolutely continuous w.r.t. P0");
    if (!q1_ac_q0) throw InfeasibleError("Q1 not absolutely continuous w.r.t. Q0");
    if (q1_eq_q0) throw InfeasibleError("Q1 equals Q0: warden side is degenerate");
  }
};

// One weighted non-innocent symbol of a multi-symbol channel.
struct ChannelSymbol {
  FiniteDistribution p;  // main-channel row
  FiniteDistribution q;  // warden-channel row
  double weight = 0.0;
};

struct MultiSymbolChannel {
  FiniteDistribution p0, q0;
  std::vector<ChannelSymbol> symbols;

  MultiSymbolChannel(FiniteDistribution p0_, FiniteDistribution q0_,
                     std::vector<ChannelSymbol> symbols_)
      : p0(std::move(p0_)), q0(std::move(q0_)), symbols(std::move(symbols_)) {
    if (symbols.empty()) throw ConfigError("no non-innocent symbols");
    NeumaierSum w;
    for (const auto& s : symbols) {
      if (!(s.weight >= 0.0)) throw ConfigError("negative symbol weight");
      w.add(s.weight);
    }
    if (std::abs(w.value() - 1.0) > 1e-12) throw ConfigError("symbol weights do not sum to 1");
  }

  // weight-averaged active warden row sum_i p_i * Q_i
  FiniteDistribution mean_active_warden_row() const {
    std::vector<double> m(q0.size(), 0.0);
    for (const auto& s : symbols)
      for (size_t z = 0; z < q0.size(); ++z) m[z] += s.weight * s.q[z];
    return FiniteDistribution(std::move(m));
  }
};

// Real-valued channel: x0 = 0, active amplitude x1, independent additive
// Gaussian noise per side.
struct GaussianPair {
  double x1;
  double sigma_main;
  double sigma_warden;

  GaussianPair(double x1_, double sigma_main_, double sigma_warden_)
      : x1(x1_), sigma_main(sigma_main_), sigma_warden(sigma_warden_) {
    if (!(sigma_main > 0.0) || !(sigma_warden > 0.0))
      throw ConfigError("noise standard deviations must be positive");
    if (x1 == 0.0) throw ConfigError("active amplitude must be nonzero");
  }
};

// Capacity of the binary-input channel {x0, x1} -> rows (p0, p1), with the
// maximizing input weight. The objective alpha -> I(alpha) is concave, so a
// 1-D ternary search suffices (tolerance 1e-10 on alpha).
struct BinaryCapacity {
  double capacity_nats = 0.0;
  double alpha_star = 0.0;
};

inline BinaryCapacity capacity_binary_input(const FiniteDistribution& p0,
                                            const FiniteDistribution& p1) {
  const auto objective = [&](double a) { return mutual_info_binary(a, p1, p0); };
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-10) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (objective(m1) < objective(m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  const double a = 0.5 * (lo + hi);
  return {objective(a), a};
}

inline BinaryCapacity capacity_binary_input(const ChannelPair& pair) {
  return capacity_binary_input(pair.p0, pair.p1);
}

// Single-letter closed forms for an additive Gaussian side with amplitude x1
// and noise sigma. All follow from log(P1/P0)(y) = (x1/sigma^2) y - x1^2/(2 sigma^2).
struct GaussianClosedForms {
  double kl = 0.0;         // D(P1||P0) = x1^2 / (2 sigma^2)
  double chi2 = 0.0;       // exp(x1^2/sigma^2) - 1
  double zeta = 0.0;       // int P1^2/P0 = exp(x1^2/sigma^2)
  double llr_slope = 0.0;  // x1 / sigma^2
};

inline GaussianClosedForms gaussian_side_closed_forms(double x1, double sigma) {
  const double r = x1 * x1 / (sigma * sigma);
  GaussianClosedForms f;
  f.kl = 0.5 * r;
  f.zeta = std::exp(r);
  f.chi2 = std::expm1(r);
  f.llr_slope = x1 / (sigma * sigma);
  return f;
}

struct GaussianPairClosedForms {
  GaussianClosedForms main;
  GaussianClosedForms warden;
};

inline GaussianPairClosedForms gaussian_closed_forms(const GaussianPair& g) {
  return {gaussian_side_closed_forms(g.x1, g.sigma_main),
          gaussian_side_closed_forms(g.x1, g.sigma_warden)};
}

}  // namespace covert
