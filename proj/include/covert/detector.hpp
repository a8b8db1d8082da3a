#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "covert/channel.hpp"
#include "covert/codebook.hpp"
#include "covert/divergence.hpp"
#include "covert/errors.hpp"
#include "covert/numeric.hpp"
#include "covert/rng.hpp"

namespace covert {

// The warden tests H0 (innocent, Z ~ Q0^n) against H1 (communication). The
// default H1 model is the single-letter product mixture Q_alpha^n, which the
// codebook-induced law approaches exponentially fast; the statistic is then a
// plain per-letter LLR sum.
inline double lrt_statistic(std::span<const uint8_t> z, const FiniteDistribution& model_h1,
                            const FiniteDistribution& q0) {
  if (model_h1.size() != q0.size()) throw ConfigError("alphabet size mismatch");
  if (!model_h1.absolutely_continuous_wrt(q0))
    throw InfeasibleError("H1 model not absolutely continuous w.r.t. Q0");
  std::vector<double> table(q0.size());
  for (size_t v = 0; v < q0.size(); ++v) {
    if (model_h1[v] == 0.0) {
      table[v] = -kInf;
    } else if (q0[v] == 0.0) {
      table[v] = kInf;
    } else {
      table[v] = std::log(model_h1[v] / q0[v]);
    }
  }
  detail::LlrSum s;
  for (uint8_t v : z) s.add(table[v]);
  return s.value();
}

// Every test the warden can run obeys alpha + beta >= 1 - sqrt(budget) when
// the simulated system's divergence budget is `budget` (KL form), or
// 1 - tv in total variation (the Gaussian route).
inline double detection_floor(double divergence_budget) {
  if (!(divergence_budget >= 0.0)) throw ConfigError("budget must be non-negative");
  return std::clamp(1.0 - std::sqrt(divergence_budget), 0.0, 1.0);
}

inline double detection_floor_tv(double total_variation) {
  if (!(total_variation >= 0.0)) throw ConfigError("total variation must be non-negative");
  return std::clamp(1.0 - total_variation, 0.0, 1.0);
}

struct RocPoint {
  double threshold = 0.0;
  double alpha_hat = 0.0;  // P[reject H0 | H0], estimated
  double alpha_se = 0.0;
  double beta_hat = 0.0;  // P[accept H0 | H1], estimated
  double beta_se = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  uint64_t trials_h0 = 0;
  uint64_t trials_h1 = 0;

  double min_alpha_plus_beta() const {
    double best = kInf;
    for (const auto& p : points) best = std::min(best, p.alpha_hat + p.beta_hat);
    return best;
  }
};

// 41 thresholds spanning mean +/- 5 sd of the H0 statistic.
inline std::vector<double> default_thresholds(uint64_t n, const FiniteDistribution& model_h1,
                                              const FiniteDistribution& q0) {
  const FiniteDistribution qa = model_h1;
  double mean = 0.0, second = 0.0;
  for (size_t v = 0; v < q0.size(); ++v) {
    if (q0[v] == 0.0) continue;
    const double x = std::log(qa[v] / q0[v]);
    mean += q0[v] * x;
    second += q0[v] * x * x;
  }
  const double var = std::max(0.0, second - mean * mean);
  const double center = double(n) * mean;
  const double spread = 5.0 * std::sqrt(double(n) * var);
  std::vector<double> t(41);
  for (int i = 0; i < 41; ++i) t[i] = center - spread + (2.0 * spread) * double(i) / 40.0;
  return t;
}

// Empirical ROC of the product-model LRT. H0 transcripts are i.i.d. Q0^n;
// H1 transcripts come from the caller (full codec transmissions). Both sides
// are deterministic in (seed, config); the curve is a fold over trial index.
inline RocCurve empirical_roc(const FiniteDistribution& q0, const FiniteDistribution& model_h1,
                              uint32_t n,
                              const std::function<std::vector<uint8_t>(uint64_t)>& h1_sampler,
                              std::vector<double> thresholds, uint64_t trials, uint64_t seed) {
  if (trials < 100) throw ConfigError("detection needs at least 100 trials per hypothesis");
  const DmcSide side(q0, q0);  // innocent sampling only
  std::vector<double> h0_stats(trials), h1_stats(trials);
  std::vector<uint8_t> z;
  for (uint64_t t = 0; t < trials; ++t) {
    CounterRng rng(seed, {stream::kDetector, 0, t});
    side.sample_innocent_block(n, rng, z);
    h0_stats[t] = lrt_statistic(z, model_h1, q0);
  }
  for (uint64_t t = 0; t < trials; ++t) {
    const auto zz = h1_sampler(t);
    h1_stats[t] = lrt_statistic(zz, model_h1, q0);
  }

  RocCurve curve;
  curve.trials_h0 = trials;
  curve.trials_h1 = trials;
  curve.points.reserve(thresholds.size());
  for (double thr : thresholds) {
    uint64_t rejects_h0 = 0, accepts_h1 = 0;
    for (double s : h0_stats) rejects_h0 += (s > thr) ? 1 : 0;
    for (double s : h1_stats) accepts_h1 += (s <= thr) ? 1 : 0;
    RocPoint p;
    p.threshold = thr;
    p.alpha_hat = double(rejects_h0) / double(trials);
    p.beta_hat = double(accepts_h1) / double(trials);
    p.alpha_se = std::sqrt(p.alpha_hat * (1.0 - p.alpha_hat) / double(trials));
    p.beta_se = std::sqrt(p.beta_hat * (1.0 - p.beta_hat) / double(trials));
    curve.points.push_back(p);
  }
  return curve;
}

// How effective a test with measured errors (alpha, beta) actually is, next
// to the ceiling budget/2 implied by the system's divergence budget.
struct JsdEffectiveness {
  double jsd = 0.0;
  double upper = 0.0;
};

inline JsdEffectiveness jsd_effectiveness(double alpha_hat, double beta_hat,
                                          double divergence_budget) {
  return {jensen_shannon_binary(alpha_hat, 1.0 - beta_hat), divergence_budget / 2.0};
}

}  // namespace covert
