#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>

namespace covert {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline double nats_to_bits(double nats) { return nats / std::numbers::ln2_v<double>; }

// Neumaier-compensated accumulator. Divergence sums mix terms spanning many
// orders of magnitude once the mixture weight drops below ~1e-4, so plain
// left-to-right summation loses the small terms.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// log C(n, k) via lgamma.
inline double log_binomial_coeff(uint64_t n, uint64_t k) {
  if (k > n) return -kInf;
  return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
         std::lgamma(double(n - k) + 1.0);
}

// P[Binomial(n, p) = k]
inline double binomial_pmf(uint64_t n, double p, uint64_t k) {
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  const double lp = log_binomial_coeff(n, k) + double(k) * std::log(p) +
                    double(n - k) * std::log1p(-p);
  return std::exp(lp);
}

// P[Binomial(n, p) >= k], exact summation.
inline double binomial_sf(uint64_t n, double p, uint64_t k) {
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  NeumaierSum s;
  for (uint64_t j = k; j <= n; ++j) {
    const double term = binomial_pmf(n, p, j);
    s.add(term);
    if (j > uint64_t(double(n) * p) && term < 1e-18 * (s.value() + 1e-300)) break;
  }
  return std::min(1.0, s.value());
}

// P[Binomial(n, p) <= k]
inline double binomial_cdf(uint64_t n, double p, uint64_t k) {
  if (k >= n) return 1.0;
  NeumaierSum s;
  for (uint64_t j = 0; j <= k; ++j) s.add(binomial_pmf(n, p, j));
  return std::min(1.0, s.value());
}

// P[N(0,1) >= x]
inline double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2_v<double>); }

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = detail::simpson(f, a, b, fa, fm, fb);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60);
}

}  // namespace covert
