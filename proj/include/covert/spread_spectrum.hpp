#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "covert/channel.hpp"
#include "covert/codebook.hpp"
#include "covert/divergence.hpp"
#include "covert/errors.hpp"
#include "covert/numeric.hpp"
#include "covert/process.hpp"
#include "covert/trial.hpp"

namespace covert {

// Key-driven spread-spectrum scheme: a key-indexed spreading sequence places
// roughly omega_n*sqrt(n) active positions, a one-time pad flips each active
// symbol to x0 with probability 1/2 (a Z-channel on the input), and a short
// dense code of length n' rides on the first n' active positions.

// Header-level key accounting:
//   log K~ = (1+delta)(1+2mu) omega_n sqrt(n) log(n)  (spreading-sequence key)
//   log K^ = (1+epsilon) omega_n sqrt(n)              (pad key)
struct SpreadKeySizes {
  double log_k_tilde = 0.0;
  double log_k_hat = 0.0;
};

inline SpreadKeySizes key_sizes(uint64_t n, const OmegaSchedule& schedule, double mu,
                                double delta, double epsilon) {
  const double w = schedule.value(n) * std::sqrt(double(n));
  return {(1.0 + delta) * (1.0 + 2.0 * mu) * w * std::log(double(n)), (1.0 + epsilon) * w};
}

// Headline sizes of the scheme. Reads nothing but the main channel: the key
// budget makes it universal with respect to the warden.
struct SpreadSchemeSizes {
  double log_m = 0.0;        // (1-xi) omega_n sqrt(n) C
  double log_k_total = 0.0;  // (1+xi) omega_n sqrt(n) log n
  double beta_n = 0.0;       // post-modulation active weight alpha_n / 2
  double capacity_nats = 0.0;
};

inline SpreadSchemeSizes spread_scheme_sizes(const FiniteDistribution& p0,
                                             const FiniteDistribution& p1, uint64_t n,
                                             const OmegaSchedule& schedule, double xi = 0.5) {
  if (!(xi > 0.0 && xi < 1.0)) throw ConfigError("xi outside ]0, 1[");
  const double omega = schedule.value(n);
  const double w = omega * std::sqrt(double(n));
  const double c = capacity_binary_input(p0, p1).capacity_nats;
  return {(1.0 - xi) * w * c, (1.0 + xi) * w * std::log(double(n)), omega / (2.0 * std::sqrt(double(n))), c};
}

// K~ sequences drawn from Bernoulli(alpha_n)^n conditioned on the support
// window [(1-eps) w, (1+eps) w], w = omega_n sqrt(n). Rejection sampling is
// the exact sampler of that conditional law; the acceptance rate estimates
// lambda_n.
class SpreadingCode {
 public:
  SpreadingCode(uint32_t n, double alpha_n, double epsilon, uint64_t k_tilde, uint64_t seed)
      : n_(n), alpha_n_(alpha_n), epsilon_(epsilon), seed_(seed) {
    if (k_tilde == 0) throw ConfigError("spreading code needs at least one sequence");
    if (!(alpha_n > 0.0 && alpha_n <= 0.5)) throw ConfigError("alpha_n outside ]0, 1/2]");
    const double mean = alpha_n * double(n);
    const double lo = (1.0 - epsilon) * mean, hi = (1.0 + epsilon) * mean;
    offsets_.reserve(k_tilde + 1);
    offsets_.push_back(0);
    uint64_t attempts = 0, accepted = 0;
    std::vector<uint32_t> tmp;
    for (uint64_t i = 0; i < k_tilde; ++i) {
      CounterRng rng(seed, {stream::kSpreading, i});
      uint64_t local = 0;
      for (;;) {
        ++attempts;
        if (++local > 1000000)
          throw InfeasibleError("spreading window acceptance below 1e-3");
        tmp.clear();
        rng.sample_support(n, alpha_n, tmp);
        const double s = double(tmp.size());
        if (s >= lo && s <= hi) break;
      }
      ++accepted;
      positions_.insert(positions_.end(), tmp.begin(), tmp.end());
      offsets_.push_back(positions_.size());
    }
    lambda_estimate_ = double(accepted) / double(attempts);
  }

  uint32_t blocklength() const { return n_; }
  double alpha_n() const { return alpha_n_; }
  double epsilon() const { return epsilon_; }
  uint64_t seed() const { return seed_; }
  uint64_t size() const { return offsets_.size() - 1; }
  double lambda_estimate() const { return lambda_estimate_; }

  SparseCodeword sequence(uint64_t i) const {
    return {n_, {positions_.begin() + long(offsets_[i]), positions_.begin() + long(offsets_[i + 1])}};
  }

 private:
  uint32_t n_;
  double alpha_n_;
  double epsilon_;
  uint64_t seed_;
  double lambda_estimate_ = 0.0;
  std::vector<size_t> offsets_;
  std::vector<uint32_t> positions_;
};

inline SpreadingCode generate_spreading_code(uint32_t n, double alpha_n, double epsilon,
                                             uint64_t k_tilde, uint64_t seed) {
  return SpreadingCode(n, alpha_n, epsilon, k_tilde, seed);
}

// Chernoff floor on the rejection acceptance rate: 1 - 2 exp(-eps^2 w / 3).
inline double spreading_acceptance_floor(uint32_t n, double alpha_n, double epsilon) {
  return 1.0 - 2.0 * std::exp(-epsilon * epsilon * alpha_n * double(n) / 3.0);
}

// The j-th active position keeps x1 iff (j <= n' and b_j xor s_j = 1) or
// (j > n' and s_j = 1); everything off the spreading support stays x0.
inline SparseCodeword modulate(const SparseCodeword& x_tilde, std::span<const uint8_t> b,
                               std::span<const uint8_t> s_hat) {
  const size_t supp = x_tilde.support.size();
  if (s_hat.size() < supp) throw ConfigError("pad shorter than spreading support");
  const size_t n_prime = b.size();
  SparseCodeword out;
  out.n = x_tilde.n;
  for (size_t j = 0; j < supp; ++j) {
    const uint8_t bit = (j < n_prime) ? uint8_t((b[j] ^ s_hat[j]) & 1) : uint8_t(s_hat[j] & 1);
    if (bit) out.support.push_back(x_tilde.support[j]);
  }
  return out;
}

// Inner code riding on the first n' active positions: how long, how big, and
// the decoding margins. Misses dominate at desk scale, so the threshold sits
// well below the n'*C score of the true word; wrong-word mass lies far below
// zero and stays controlled as long as log M < gamma.
struct ModulationPlan {
  uint32_t n_prime = 0;
  double inner_log_m = 0.0;
  double pad_key_bits = 0.0;  // length budget of the pad key s
  double alpha_star = 0.5;    // capacity-achieving input weight of the main channel
  double capacity_nats = 0.0;
  double gamma_inner = 0.0;       // decoding threshold (nats)
  double presence_threshold = 0.0;
  double inner_nu = 0.75;
  double inner_delta = 0.1;
};

inline ModulationPlan make_modulation_plan(const FiniteDistribution& p0,
                                           const FiniteDistribution& p1, uint64_t n,
                                           const OmegaSchedule& schedule, double epsilon,
                                           double inner_nu = 0.75, double inner_delta = 0.1) {
  for (double s : {epsilon, inner_nu, inner_delta})
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("slack constants must lie in ]0, 1[");
  const double w = schedule.value(n) * std::sqrt(double(n));
  const auto cap = capacity_binary_input(p0, p1);
  ModulationPlan plan;
  plan.n_prime = uint32_t(std::ceil((1.0 - epsilon) * w));
  plan.alpha_star = cap.alpha_star;
  plan.capacity_nats = cap.capacity_nats;
  plan.gamma_inner = (1.0 - inner_nu) * double(plan.n_prime) * cap.capacity_nats;
  plan.inner_log_m = (1.0 - inner_delta) * plan.gamma_inner;
  plan.pad_key_bits = std::ceil((1.0 + epsilon) * w);
  plan.inner_nu = inner_nu;
  plan.inner_delta = inner_delta;
  return plan;
}

// M dense binary codewords of length n', i.i.d. Bernoulli(alpha_star).
class InnerCodebook {
 public:
  InnerCodebook(const ModulationPlan& plan, uint64_t seed)
      : n_prime_(plan.n_prime),
        m_(std::max<uint64_t>(2, uint64_t(std::ceil(std::exp(plan.inner_log_m))))) {
    if (!(plan.inner_log_m < 30.0)) throw InfeasibleError("inner codebook too large");
    bits_.resize(size_t(m_) * n_prime_);
    for (uint64_t w = 0; w < m_; ++w) {
      CounterRng rng(seed, {stream::kInnerCode, w});
      for (uint32_t j = 0; j < n_prime_; ++j)
        bits_[size_t(w) * n_prime_ + j] = rng.next_bernoulli(plan.alpha_star) ? 1 : 0;
    }
  }

  uint64_t messages() const { return m_; }
  uint32_t length() const { return n_prime_; }
  std::span<const uint8_t> word(uint64_t w) const {
    return {bits_.data() + size_t(w) * n_prime_, n_prime_};
  }

 private:
  uint32_t n_prime_;
  uint64_t m_;
  std::vector<uint8_t> bits_;
};

namespace detail {

// log(row_x(v) / baseline_s(v)) tables indexed [s][x][v], where baseline_s is
// the output law of a padded Bernoulli(alpha_star) bit given pad bit s.
struct InnerScoreTables {
  std::vector<double> t[2][2];

  InnerScoreTables(const FiniteDistribution& p0, const FiniteDistribution& p1,
                   double alpha_star) {
    const FiniteDistribution base0 = mix(alpha_star, p1, p0);        // pad bit 0
    const FiniteDistribution base1 = mix(1.0 - alpha_star, p1, p0);  // pad bit 1
    for (int s = 0; s < 2; ++s) {
      const FiniteDistribution& base = s ? base1 : base0;
      for (int x = 0; x < 2; ++x) {
        const FiniteDistribution& row = x ? p1 : p0;
        t[s][x].resize(p0.size());
        for (size_t v = 0; v < p0.size(); ++v) {
          if (row[v] == 0.0) {
            t[s][x][v] = -kInf;
          } else if (base[v] == 0.0) {
            t[s][x][v] = kInf;  // unreachable output under this pad model
          } else {
            t[s][x][v] = std::log(row[v] / base[v]);
          }
        }
      }
    }
  }
};

}  // namespace detail

// Bob's side: y_window is the received block restricted to the spreading
// support. Declares an error when the support is shorter than the inner code,
// runs a presence test against the all-innocent hypothesis (the surviving
// actives are Bernoulli(1/2), so the window model is the half mixture), then
// un-pads and threshold-decodes the inner code by information density.
inline DecodeResult demodulate_and_decode(std::span<const uint8_t> y_window,
                                          const SparseCodeword& x_tilde,
                                          std::span<const uint8_t> s_hat,
                                          const InnerCodebook& inner, const DmcSide& side,
                                          const ModulationPlan& plan) {
  const size_t supp = x_tilde.support.size();
  if (y_window.size() != supp) throw ConfigError("window length mismatch");
  if (s_hat.size() < supp) throw ConfigError("pad shorter than spreading support");
  DecodeResult r;
  r.best_score = -kInf;
  if (supp < plan.n_prime) {  // too few active positions to carry the code
    r.ambiguous = true;
    return r;
  }

  // presence test: window LLR of the half mixture against all-innocent
  const FiniteDistribution half = mix(0.5, side.row1(), side.row0());
  covert::detail::LlrSum presence;
  for (size_t j = 0; j < supp; ++j) {
    const double p = half[y_window[j]];
    const double q = side.row0()[y_window[j]];
    presence.add(p == 0.0 ? -kInf : (q == 0.0 ? kInf : std::log(p / q)));
  }
  if (!(presence.value() > plan.presence_threshold)) return r;  // T-hat = 0

  const detail::InnerScoreTables tables(side.row0(), side.row1(), plan.alpha_star);
  uint32_t above = 0;
  for (uint64_t w = 0; w < inner.messages(); ++w) {
    const auto bits = inner.word(w);
    covert::detail::LlrSum s;
    for (uint32_t j = 0; j < plan.n_prime; ++j) {
      const int pad = s_hat[j] & 1;
      const int x = (bits[j] ^ pad) & 1;  // symbol actually sent for this bit
      s.add(tables.t[pad][x][y_window[j]]);
    }
    const double sc = s.value();
    if (sc > r.best_score) r.best_score = sc;
    if (sc > plan.gamma_inner) {
      if (++above > 1) {
        r.ambiguous = true;
        r.detected = false;
      } else {
        r.message = w;
      }
    }
  }
  if (above == 1) r.detected = true;
  return r;
}

// Divergence cost of spreading with K~ sequences (source-resolvability side):
//   (n/lambda) log(2/alpha) P[supp >= (gamma + n log(1-alpha)) / log((1-alpha)/alpha)]
//   + log(1/lambda + e^gamma / K~)
// with the support tail evaluated as an exact binomial survival function.
inline double spreading_divergence_bound(uint32_t n, double alpha_n, double log_k_tilde,
                                         double gamma, double lambda_n) {
  if (!(alpha_n > 0.0 && alpha_n < 0.5)) throw ConfigError("requires 0 < alpha_n < 1/2");
  if (!(lambda_n > 0.0 && lambda_n <= 1.0)) throw ConfigError("lambda_n outside ]0, 1]");
  if (std::pow(alpha_n, double(n)) > lambda_n)
    throw InfeasibleError("blocklength too small for the spreading bound");
  const double t = (gamma + double(n) * std::log1p(-alpha_n)) /
                   std::log((1.0 - alpha_n) / alpha_n);
  double tail = 1.0;
  if (t > 0.0) {
    const auto k = uint64_t(std::ceil(t - 1e-12));
    tail = binomial_sf(n, alpha_n, k);
  }
  const double first = double(n) / lambda_n * std::log(2.0 / alpha_n) * tail;
  return first + std::log(1.0 / lambda_n + std::exp(gamma - log_k_tilde));
}

// gamma choice that turns the support tail into P[supp > (1+mu) w].
inline double spreading_gamma_for_slack(uint32_t n, double alpha_n, double mu) {
  const double w = alpha_n * double(n);
  return (1.0 + mu) * w * std::log(1.0 / alpha_n - 1.0) - double(n) * std::log1p(-alpha_n);
}

}  // namespace covert
