#pragma once

// Test-side oracles, kept independent of the library implementation paths
// they check: plain long-double summations, a self-contained quadrature
// routine, dense decoding scores, and exact single-letter Neyman-Pearson
// curves.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "covert/distribution.hpp"
#include "covert/rng.hpp"

namespace oracle {

// D(P||Q) by direct long-double summation.
inline double kl_direct(const std::vector<double>& p, const std::vector<double>& q) {
  long double s = 0.0L;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    s += (long double)p[i] * std::log((long double)p[i] / (long double)q[i]);
  }
  return double(s);
}

inline double tv_direct(const std::vector<double>& p, const std::vector<double>& q) {
  long double s = 0.0L;
  for (size_t i = 0; i < p.size(); ++i) s += std::abs((long double)p[i] - (long double)q[i]);
  return double(s / 2.0L);
}

inline double chi_k_direct(const std::vector<double>& q1, const std::vector<double>& q0, int k,
                           bool negative_only = false) {
  long double s = 0.0L;
  for (size_t z = 0; z < q0.size(); ++z) {
    if (q0[z] == 0.0) continue;
    const long double d = (long double)q1[z] - (long double)q0[z];
    if (negative_only && d >= 0.0L) continue;
    s += std::pow(d, k) / std::pow((long double)q0[z], k - 1);
  }
  return double(s);
}

inline double mixture_kl_direct(double alpha, const std::vector<double>& q1,
                                const std::vector<double>& q0) {
  long double s = 0.0L;
  for (size_t z = 0; z < q0.size(); ++z) {
    const long double qa =
        (long double)alpha * q1[z] + (1.0L - (long double)alpha) * q0[z];
    if (qa <= 0.0L || q0[z] == 0.0) continue;
    s += qa * std::log(qa / (long double)q0[z]);
  }
  return double(s);
}

// Composite-Simpson refinement until two successive grids agree to tol.
inline double integrate_refine(const std::function<double(double)>& f, double a, double b,
                               double tol) {
  auto simpson = [&](uint64_t intervals) {
    const double h = (b - a) / double(intervals);
    long double s = f(a) + f(b);
    for (uint64_t i = 1; i < intervals; ++i)
      s += f(a + h * double(i)) * ((i % 2) ? 4.0 : 2.0);
    return double(s * (long double)h / 3.0L);
  };
  double prev = simpson(64);
  for (uint64_t m = 128; m <= (uint64_t(1) << 22); m *= 2) {
    const double cur = simpson(m);
    if (std::abs(cur - prev) <= tol * (1.0 + std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

inline double normal_pdf(double z, double mean, double sigma) {
  const double d = (z - mean) / sigma;
  return std::exp(-0.5 * d * d) / (sigma * std::sqrt(2.0 * 3.14159265358979323846));
}

// Dense relative-entropy density: every position contributes, x0-positions
// contribute exactly zero.
inline double dense_score(const std::vector<uint8_t>& x_active, const std::vector<uint8_t>& y,
                          const covert::FiniteDistribution& p0,
                          const covert::FiniteDistribution& p1) {
  long double s = 0.0L;
  bool neg_inf = false, pos_inf = false;
  for (size_t i = 0; i < y.size(); ++i) {
    const double w = x_active[i] ? p1[y[i]] : p0[y[i]];
    const double base = p0[y[i]];
    if (w == 0.0) {
      neg_inf = true;
    } else if (base == 0.0) {
      pos_inf = true;
    } else {
      s += std::log((long double)w / (long double)base);
    }
  }
  if (neg_inf) return -covert::kInf;
  if (pos_inf) return covert::kInf;
  return double(s);
}

// Exact single-letter Neyman-Pearson point at a given LLR threshold:
// alpha = P_H0[llr > t], beta = P_H1[llr <= t].
struct NpPoint {
  double alpha = 0.0;
  double beta = 0.0;
};

inline NpPoint np_point(double threshold, const covert::FiniteDistribution& q0,
                        const covert::FiniteDistribution& q1) {
  NpPoint p;
  for (size_t z = 0; z < q0.size(); ++z) {
    double llr;
    if (q1[z] == 0.0) {
      llr = -covert::kInf;
    } else if (q0[z] == 0.0) {
      llr = covert::kInf;
    } else {
      llr = std::log(q1[z] / q0[z]);
    }
    if (llr > threshold) {
      p.alpha += q0[z];
    } else {
      p.beta += q1[z];
    }
  }
  return p;
}

// P[Chi2(1 dof) > x]
inline double chi2_1dof_pvalue(double x) { return std::erfc(std::sqrt(x / 2.0)); }

// Random distribution with all masses >= floor_mass, deterministic in (rng).
inline covert::FiniteDistribution random_distribution(covert::CounterRng& rng, size_t size,
                                                      double floor_mass = 1e-3) {
  std::vector<double> m(size);
  double sum = 0.0;
  for (auto& v : m) {
    v = floor_mass + rng.next_unit();
    sum += v;
  }
  for (auto& v : m) v /= sum;
  // repair rounding so the strict sum-to-1 invariant holds
  double acc = 0.0;
  for (size_t i = 0; i + 1 < m.size(); ++i) acc += m[i];
  m.back() = 1.0 - acc;
  return covert::FiniteDistribution(std::move(m));
}

}  // namespace oracle
