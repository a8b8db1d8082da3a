#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "covert/errors.hpp"
#include "covert/numeric.hpp"

namespace covert {

// Probability masses over a finite output alphabet. Immutable after
// construction; masses must be non-negative and sum to 1 within 1e-12.
class FiniteDistribution {
 public:
  FiniteDistribution() = default;
  explicit FiniteDistribution(std::vector<double> masses) : p_(std::move(masses)) { validate(); }
  FiniteDistribution(std::initializer_list<double> masses) : p_(masses) { validate(); }

  static FiniteDistribution bernoulli(double p1) { return FiniteDistribution{1.0 - p1, p1}; }

  size_t size() const { return p_.size(); }
  double operator[](size_t i) const { return p_[i]; }
  const std::vector<double>& masses() const { return p_; }

  // Exact-zero test: masses are specified, not estimated.
  bool absolutely_continuous_wrt(const FiniteDistribution& q) const {
    if (size() != q.size()) throw ConfigError("alphabet size mismatch");
    for (size_t i = 0; i < size(); ++i)
      if (q.p_[i] == 0.0 && p_[i] > 0.0) return false;
    return true;
  }

  bool operator==(const FiniteDistribution& o) const { return p_ == o.p_; }

  // Smallest positive mass.
  double min_positive_mass() const {
    double m = kInf;
    for (double v : p_)
      if (v > 0.0 && v < m) m = v;
    return m;
  }

 private:
  void validate() const {
    if (p_.empty()) throw ConfigError("empty distribution");
    NeumaierSum s;
    for (double v : p_) {
      if (!(v >= 0.0)) throw ConfigError("negative probability mass");
      s.add(v);
    }
    if (std::abs(s.value() - 1.0) > 1e-12) throw ConfigError("masses do not sum to 1");
  }

  std::vector<double> p_;
};

// Pointwise mixture a*P1 + (1-a)*P0.
inline FiniteDistribution mix(double a, const FiniteDistribution& p1,
                              const FiniteDistribution& p0) {
  if (p1.size() != p0.size()) throw ConfigError("alphabet size mismatch");
  std::vector<double> m(p0.size());
  for (size_t i = 0; i < p0.size(); ++i) m[i] = a * p1[i] + (1.0 - a) * p0[i];
  return FiniteDistribution(std::move(m));
}

}  // namespace covert
