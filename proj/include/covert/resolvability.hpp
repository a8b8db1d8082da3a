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
#include "covert/process.hpp"
#include "covert/trial.hpp"

namespace covert {

// ---------------------------------------------------------------------------
// Designer
// ---------------------------------------------------------------------------

// Sizes a keyed sparse codebook for a channel pair:
//   log M = (1-xi) * omega_n * sqrt(n) * D(P1||P0)
//   log K = omega_n * sqrt(n) * [(1+xi) D(Q1||Q0) - (1-xi) D(P1||P0)]^+
// so no key is needed when the main channel dominates the warden's. gamma and
// tau anchor the decoder and the resolvability analysis at the typical score
// of a weight-omega*sqrt(n) codeword, shrunk/stretched by the slack pair
// (mu, nu).
inline CovertParameters design(const ChannelPair& pair, uint64_t n, const OmegaSchedule& schedule,
                               double xi = 0.5, double mu = 0.1, double nu = 0.1,
                               double delta = 0.1, double epsilon = 0.1) {
  pair.require_standing_assumptions();
  for (double s : {xi, mu, nu, delta, epsilon})
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("slack constants must lie in ]0, 1[");

  CovertParameters p;
  p.n = n;
  p.schedule = schedule;
  p.omega_n = schedule.value(n);
  p.alpha_n = p.omega_n / std::sqrt(double(n));
  p.beta_n = p.alpha_n / 2.0;
  p.xi = xi;
  p.mu = mu;
  p.nu = nu;
  p.delta = delta;
  p.epsilon = epsilon;

  const double root_n_weight = p.omega_n * std::sqrt(double(n));
  const double d_main = kl(pair.p1, pair.p0);
  const double d_warden = kl(pair.q1, pair.q0);
  p.log_m = (1.0 - xi) * root_n_weight * d_main;
  p.log_k = root_n_weight * std::max(0.0, (1.0 + xi) * d_warden - (1.0 - xi) * d_main);
  p.gamma = (1.0 - mu) * (1.0 - nu) * root_n_weight * d_main;
  p.tau = (1.0 + mu) * (1.0 + nu) * root_n_weight * d_warden;
  p.m_codewords = std::ceil(std::exp(p.log_m));
  p.k_codebooks = std::max(1.0, std::ceil(std::exp(p.log_k)));
  return p;
}

inline Codebook generate_codebook(const CovertParameters& params, const ChannelPair&,
                                  uint64_t seed,
                                  uint64_t memory_ceiling = kDefaultMemoryCeiling) {
  if (!(params.m_codewords * params.k_codebooks < 9.0e18))
    throw InfeasibleError("codebook too large to materialize");
  return Codebook(uint64_t(params.m_codewords), uint64_t(params.k_codebooks),
                  uint32_t(params.n), params.alpha_n, seed, memory_ceiling);
}

// ---------------------------------------------------------------------------
// Analytic error / resolvability bounds
// ---------------------------------------------------------------------------

namespace detail {

struct LlrMoments {
  double mean = 0.0;   // KL divergence of row1 from row0
  double range = 0.0;  // spread of log(row1/row0) over the support of row1
};

inline LlrMoments llr_moments(const FiniteDistribution& row1, const FiniteDistribution& row0) {
  LlrMoments m;
  m.mean = kl(row1, row0);
  double lo = kInf, hi = -kInf;
  for (size_t y = 0; y < row1.size(); ++y) {
    if (row1[y] == 0.0) continue;
    const double v = std::log(row1[y] / row0[y]);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  m.range = (hi > lo) ? hi - lo : 0.0;
  return m;
}

// E_L[ inner(L) ] for L ~ Binomial(n, alpha), truncated at 8x the mean; the
// truncated mass is charged in full, so the result stays an upper bound.
inline double support_conditioned_tail(uint64_t n, double alpha,
                                       const std::function<double(uint64_t)>& inner) {
  const double mean = double(n) * alpha;
  const uint64_t ell_max = std::min<uint64_t>(n, uint64_t(std::ceil(8.0 * mean)) + 16);
  NeumaierSum s;
  for (uint64_t ell = 0; ell <= ell_max; ++ell) {
    const double w = binomial_pmf(n, alpha, ell);
    if (w == 0.0) continue;
    s.add(w * std::clamp(inner(ell), 0.0, 1.0));
  }
  s.add(binomial_sf(n, alpha, ell_max + 1));
  return std::min(1.0, s.value());
}

// Hoeffding bound on P[ sum of ell i.i.d. llr terms <= threshold ].
inline double hoeffding_lower_tail(uint64_t ell, const LlrMoments& m, double threshold) {
  const double mean = double(ell) * m.mean;
  if (threshold >= mean) return 1.0;
  if (ell == 0 || m.range == 0.0) return 0.0;
  const double d = mean - threshold;
  return std::exp(-2.0 * d * d / (double(ell) * m.range * m.range));
}

// Hoeffding bound on P[ sum of ell i.i.d. llr terms >= threshold ].
inline double hoeffding_upper_tail(uint64_t ell, const LlrMoments& m, double threshold) {
  const double mean = double(ell) * m.mean;
  if (threshold <= mean) return 1.0;
  if (ell == 0 || m.range == 0.0) return 0.0;
  const double d = threshold - mean;
  return std::exp(-2.0 * d * d / (double(ell) * m.range * m.range));
}

}  // namespace detail

// Upper bound on the expected decoding error of the threshold decoder:
//   P[score of the true word <= gamma] + M e^{-gamma} (1 + exp(omega^2 (zeta-1)))
// The first probability is computed by conditioning on the codeword support
// size (binomial) with a Hoeffding tail for the inner i.i.d. sum.
inline double reliability_error_bound(const CovertParameters& params, const ChannelPair& pair) {
  if (!pair.p1_ac_p0)
    throw InfeasibleError("zeta is infinite: bound inapplicable, use the support-revealing path");
  const auto m = detail::llr_moments(pair.p1, pair.p0);
  const double gamma = params.gamma;
  const double tail = detail::support_conditioned_tail(
      params.n, params.alpha_n,
      [&](uint64_t ell) { return detail::hoeffding_lower_tail(ell, m, gamma); });
  const double correction = 1.0 + std::exp(params.omega_n * params.omega_n * (pair.zeta - 1.0));
  return tail + params.m_codewords * std::exp(-gamma) * correction;
}

// Upper bound on E[ D(induced distribution || mixture product) ]:
//   n log(4/mu0) P[warden-side score >= tau] + e^tau / (MK)
inline double resolvability_divergence_bound(const CovertParameters& params,
                                             const ChannelPair& pair) {
  if (!pair.q1_ac_q0) throw InfeasibleError("Q1 not absolutely continuous w.r.t. Q0");
  if (!(params.alpha_n <= 0.5)) throw InfeasibleError("bound requires alpha_n <= 1/2");
  const auto m = detail::llr_moments(pair.q1, pair.q0);
  const double tau = params.tau;
  const double tail = detail::support_conditioned_tail(
      params.n, params.alpha_n,
      [&](uint64_t ell) { return detail::hoeffding_upper_tail(ell, m, tau); });
  const double mk = params.m_codewords * params.k_codebooks;
  return double(params.n) * std::log(4.0 / pair.mu0) * tail + std::exp(tau) / mk;
}

// Total-variation analogue: tail + sqrt(e^tau / MK) / 2.
inline double resolvability_tv_bound(const CovertParameters& params, const ChannelPair& pair) {
  if (!pair.q1_ac_q0) throw InfeasibleError("Q1 not absolutely continuous w.r.t. Q0");
  const auto m = detail::llr_moments(pair.q1, pair.q0);
  const double tau = params.tau;
  const double tail = detail::support_conditioned_tail(
      params.n, params.alpha_n,
      [&](uint64_t ell) { return detail::hoeffding_upper_tail(ell, m, tau); });
  const double mk = params.m_codewords * params.k_codebooks;
  return tail + 0.5 * std::sqrt(std::exp(tau) / mk);
}

// Gaussian warden: the per-symbol LLR under the active row is exactly
// N(kl, 2 kl) with kl = x1^2/(2 sigma^2), so the conditional tail is a closed
// form rather than a Hoeffding bound.
inline double resolvability_tv_bound(const CovertParameters& params, const GaussianPair& g) {
  const double klw = gaussian_side_closed_forms(g.x1, g.sigma_warden).kl;
  const double tau = params.tau;
  const double tail = detail::support_conditioned_tail(params.n, params.alpha_n, [&](uint64_t ell) {
    if (ell == 0) return tau <= 0.0 ? 1.0 : 0.0;
    return normal_sf((tau - double(ell) * klw) / std::sqrt(2.0 * klw * double(ell)));
  });
  const double mk = params.m_codewords * params.k_codebooks;
  return tail + 0.5 * std::sqrt(std::exp(tau) / mk);
}

// ---------------------------------------------------------------------------
// Exact small-blocklength analysis by enumeration over Z^n
// ---------------------------------------------------------------------------

inline constexpr uint64_t kEnumerationCeiling = uint64_t(1) << 22;

namespace detail {

inline uint64_t checked_enum_size(size_t alphabet, uint32_t n) {
  double size = 1.0;
  for (uint32_t i = 0; i < n; ++i) size *= double(alphabet);
  if (!(size <= double(kEnumerationCeiling)))
    throw InfeasibleError("output space too large for exact enumeration");
  return uint64_t(size);
}

// W^n(. | word) over Z^n as a flat big-endian vector, built position by
// position as a tensor product.
inline std::vector<double> word_output_pmf(std::span<const uint32_t> supp, uint32_t n,
                                           const FiniteDistribution& q0,
                                           const FiniteDistribution& q1) {
  const size_t b = q0.size();
  size_t si = 0;
  std::vector<double> cur{1.0}, next;
  for (uint32_t pos = 0; pos < n; ++pos) {
    const bool active = si < supp.size() && supp[si] == pos;
    if (active) ++si;
    const FiniteDistribution& row = active ? q1 : q0;
    next.assign(cur.size() * b, 0.0);
    for (size_t p = 0; p < cur.size(); ++p)
      for (size_t z = 0; z < b; ++z) next[p * b + z] = cur[p] * row[z];
    cur.swap(next);
  }
  return cur;
}

inline std::vector<double> word_output_pmf(const Codebook& cb, uint64_t flat,
                                           const FiniteDistribution& q0,
                                           const FiniteDistribution& q1) {
  return word_output_pmf(cb.support(flat / cb.keys(), flat % cb.keys()), cb.blocklength(), q0,
                         q1);
}

}  // namespace detail

// Product distribution row^(x) n as a flat vector indexed big-endian by the
// output string.
inline std::vector<double> product_pmf(const FiniteDistribution& row, uint32_t n) {
  const uint64_t total = detail::checked_enum_size(row.size(), n);
  std::vector<double> v{1.0};
  v.reserve(total);
  for (uint32_t i = 0; i < n; ++i) {
    std::vector<double> next(v.size() * row.size());
    for (size_t b = 0; b < v.size(); ++b)
      for (size_t z = 0; z < row.size(); ++z) next[b * row.size() + z] = v[b] * row[z];
    v.swap(next);
  }
  return v;
}

// Exact codeword-ensemble-induced warden distribution (1/|words|) sum W^n.
inline std::vector<double> exact_induced_distribution(std::span<const SparseCodeword> words,
                                                      const FiniteDistribution& q0,
                                                      const FiniteDistribution& q1) {
  if (words.empty()) throw ConfigError("empty codeword list");
  const uint64_t total = detail::checked_enum_size(q0.size(), words[0].n);
  std::vector<double> acc(total, 0.0);
  for (const auto& w : words) {
    const auto pmf = detail::word_output_pmf(w.support, w.n, q0, q1);
    for (uint64_t z = 0; z < total; ++z) acc[z] += pmf[z];
  }
  for (double& v : acc) v /= double(words.size());
  return acc;
}

// (1/MK) sum_ij W^n(z | x_ij) for a generated codebook.
inline std::vector<double> exact_induced_distribution(const Codebook& cb,
                                                      const FiniteDistribution& q0,
                                                      const FiniteDistribution& q1) {
  const uint64_t total = detail::checked_enum_size(q0.size(), cb.blocklength());
  const uint64_t words = cb.messages() * cb.keys();
  std::vector<double> acc(total, 0.0);
  for (uint64_t w = 0; w < words; ++w) {
    const auto pmf = detail::word_output_pmf(cb, w, q0, q1);
    for (uint64_t z = 0; z < total; ++z) acc[z] += pmf[z];
  }
  for (double& v : acc) v /= double(words);
  return acc;
}

inline double kl_pmf(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("pmf size mismatch");
  NeumaierSum s;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    if (b[i] == 0.0) return kInf;
    s.add(a[i] * std::log(a[i] / b[i]));
  }
  return s.value();
}

inline double tv_pmf(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("pmf size mismatch");
  NeumaierSum s;
  for (size_t i = 0; i < a.size(); ++i) s.add(std::abs(a[i] - b[i]));
  return 0.5 * s.value();
}

// ---------------------------------------------------------------------------
// Secrecy variant
// ---------------------------------------------------------------------------

// Adds semantic secrecy on top of covertness. When the main channel dominates,
// a wiretap layout does it without key material: MM' codewords, the second
// index carrying encoder-local randomness sized to saturate the warden's
// resolvability. Otherwise the plain design is kept and the message bits are
// one-time padded, with the pad charged to the key budget.
struct SecrecyDesign {
  bool wiretap_route = false;
  CovertParameters base;
  double log_m = 0.0;        // secret message size (nats)
  double log_m_prime = 0.0;  // encoder-local randomization index (nats)
  double m_messages = 1.0;
  double m_prime = 1.0;
  double pad_key_nats = 0.0;
  double pad_key_bits = 0.0;
  double log_k_total = 0.0;  // key for covertness plus pad
};

inline SecrecyDesign secrecy_design(const ChannelPair& pair, uint64_t n,
                                    const OmegaSchedule& schedule, double xi = 0.5,
                                    double mu = 0.1, double nu = 0.1, double delta = 0.1,
                                    double epsilon = 0.1) {
  SecrecyDesign s;
  s.base = design(pair, n, schedule, xi, mu, nu, delta, epsilon);
  const double root_n_weight = s.base.omega_n * std::sqrt(double(n));
  const double d_main = kl(pair.p1, pair.p0);
  const double d_warden = kl(pair.q1, pair.q0);
  s.wiretap_route = (1.0 - xi) * d_main > (1.0 + xi) * d_warden;
  if (s.wiretap_route) {
    s.log_m_prime = (1.0 + xi) * root_n_weight * d_warden;
    s.log_m = s.base.log_m - s.log_m_prime;
    s.pad_key_nats = 0.0;
    s.log_k_total = s.base.log_k;  // zero in this regime
  } else {
    s.log_m = s.base.log_m;
    s.log_m_prime = 0.0;
    s.pad_key_nats = s.base.log_m;
    s.log_k_total = s.base.log_k + s.pad_key_nats;
  }
  s.pad_key_bits = nats_to_bits(s.pad_key_nats);
  s.m_messages = std::max(1.0, std::ceil(std::exp(s.log_m)));
  s.m_prime = std::max(1.0, std::ceil(std::exp(s.log_m_prime)));
  return s;
}

// Exact I(W; Z^n) of a codebook whose message w owns the consecutive word
// rows [w*group, (w+1)*group), each picked uniformly.
inline double exact_message_leakage(const Codebook& cb, uint64_t messages, uint64_t group,
                                    const FiniteDistribution& q0, const FiniteDistribution& q1) {
  if (messages * group != cb.messages() * cb.keys())
    throw ConfigError("message grouping does not tile the codebook");
  const uint64_t total = detail::checked_enum_size(q0.size(), cb.blocklength());
  std::vector<std::vector<double>> per_msg(messages);
  std::vector<double> mean(total, 0.0);
  for (uint64_t w = 0; w < messages; ++w) {
    per_msg[w].assign(total, 0.0);
    for (uint64_t g = 0; g < group; ++g) {
      const auto pmf = detail::word_output_pmf(cb, w * group + g, q0, q1);
      for (uint64_t z = 0; z < total; ++z) per_msg[w][z] += pmf[z];
    }
    for (uint64_t z = 0; z < total; ++z) {
      per_msg[w][z] /= double(group);
      mean[z] += per_msg[w][z] / double(messages);
    }
  }
  NeumaierSum mi;
  for (uint64_t w = 0; w < messages; ++w) mi.add(kl_pmf(per_msg[w], mean) / double(messages));
  return mi.value();
}

// Exact I(W; Z^n) when the transmitted row is (w + pad) mod M with a uniform
// pad: every message induces the same mixture, so the leakage is identically
// zero. Computed literally (per-message averages in rotated order) so the
// accounting, not the algebra, is what the caller checks.
inline double exact_otp_leakage(const Codebook& cb, const FiniteDistribution& q0,
                                const FiniteDistribution& q1) {
  const uint64_t m = cb.messages() * cb.keys();
  const uint64_t total = detail::checked_enum_size(q0.size(), cb.blocklength());
  std::vector<std::vector<double>> word_pmf(m);
  for (uint64_t w = 0; w < m; ++w) word_pmf[w] = detail::word_output_pmf(cb, w, q0, q1);
  std::vector<std::vector<double>> per_msg(m, std::vector<double>(total, 0.0));
  std::vector<double> mean(total, 0.0);
  for (uint64_t w = 0; w < m; ++w) {
    for (uint64_t pad = 0; pad < m; ++pad) {
      const auto& src = word_pmf[(w + pad) % m];
      for (uint64_t z = 0; z < total; ++z) per_msg[w][z] += src[z] / double(m);
    }
    for (uint64_t z = 0; z < total; ++z) mean[z] += per_msg[w][z] / double(m);
  }
  NeumaierSum mi;
  for (uint64_t w = 0; w < m; ++w) mi.add(kl_pmf(per_msg[w], mean) / double(m));
  return mi.value();
}

// ---------------------------------------------------------------------------
// Keyless codec for support-revealing main channels (kappa > 0)
// ---------------------------------------------------------------------------

// When some main-channel outputs are impossible under x0, their positions
// expose the transmitted support. The decoder collects those positions and
// looks for the unique codeword covering them; detection thresholds on the
// count, which concentrates at n*kappa*alpha_n.
struct SupportRevealDesign {
  CovertParameters params;
  double detect_threshold = 0.0;  // (1-delta) * n * kappa * alpha_n
};

inline SupportRevealDesign design_support_reveal(const ChannelPair& pair, uint64_t n,
                                                 const OmegaSchedule& schedule, double mu = 0.5,
                                                 double delta = 0.5) {
  if (pair.kappa == 0.0) throw InfeasibleError("main channel does not reveal x1 (kappa = 0)");
  if (!pair.q1_ac_q0) throw InfeasibleError("Q1 not absolutely continuous w.r.t. Q0");
  if (pair.q1_eq_q0) throw InfeasibleError("Q1 equals Q0: warden side is degenerate");
  for (double s : {mu, delta})
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("slack constants must lie in ]0, 1[");

  SupportRevealDesign d;
  CovertParameters& p = d.params;
  p.n = n;
  p.schedule = schedule;
  p.omega_n = schedule.value(n);
  p.alpha_n = p.omega_n / std::sqrt(double(n));
  p.beta_n = p.alpha_n / 2.0;
  p.mu = mu;
  p.delta = delta;
  const double logn = std::log(double(n));
  const double root_n_weight = p.omega_n * std::sqrt(double(n));
  p.log_m = (1.0 - mu) * (1.0 - delta) * pair.kappa *
            (0.5 + std::log(1.0 / p.omega_n) / logn) * root_n_weight * logn;
  p.log_k = 0.0;
  p.tau = (1.0 + mu) * (1.0 + delta) * root_n_weight * kl(pair.q1, pair.q0);
  p.m_codewords = std::max(1.0, std::ceil(std::exp(p.log_m)));
  p.k_codebooks = 1.0;
  d.detect_threshold = (1.0 - delta) * double(n) * pair.kappa * p.alpha_n;
  return d;
}

class SupportRevealCodec {
 public:
  SupportRevealCodec(const SupportRevealDesign& design, const ChannelPair& pair, uint64_t seed,
                     uint64_t memory_ceiling = kDefaultMemoryCeiling)
      : design_(design),
        codebook_(uint64_t(design.params.m_codewords), 1, uint32_t(design.params.n),
                  design.params.alpha_n, seed, memory_ceiling) {
    reveal_.assign(pair.p0.size(), 0);
    for (size_t y = 0; y < pair.p0.size(); ++y)
      if (pair.p0[y] == 0.0 && pair.p1[y] > 0.0) reveal_[y] = 1;
    // inverted index: output position -> sorted codeword ids containing it
    index_offsets_.assign(design.params.n + 1, 0);
    for (uint64_t i = 0; i < codebook_.messages(); ++i)
      for (uint32_t pos : codebook_.support(i, 0)) ++index_offsets_[pos + 1];
    for (size_t i = 1; i < index_offsets_.size(); ++i) index_offsets_[i] += index_offsets_[i - 1];
    index_words_.resize(codebook_.total_support_entries());
    std::vector<size_t> cursor(index_offsets_.begin(), index_offsets_.end() - 1);
    for (uint64_t i = 0; i < codebook_.messages(); ++i)
      for (uint32_t pos : codebook_.support(i, 0)) index_words_[cursor[pos]++] = uint32_t(i);
  }

  const Codebook& codebook() const { return codebook_; }
  const SupportRevealDesign& design() const { return design_; }

  // Positions whose output is impossible under x0.
  std::vector<uint32_t> revealed_positions(std::span<const uint8_t> y) const {
    std::vector<uint32_t> p;
    for (uint32_t i = 0; i < y.size(); ++i)
      if (reveal_[y[i]]) p.push_back(i);
    return p;
  }

  DecodeResult decode(std::span<const uint8_t> y) const {
    const auto revealed = revealed_positions(y);
    DecodeResult r;
    r.best_score = double(revealed.size());
    if (double(revealed.size()) < design_.detect_threshold) return r;  // T-hat = 0
    // candidates = intersection of the per-position codeword lists
    std::vector<uint32_t> cand(word_list(revealed[0]).begin(), word_list(revealed[0]).end());
    std::vector<uint32_t> tmp;
    for (size_t k = 1; k < revealed.size() && !cand.empty(); ++k) {
      const auto list = word_list(revealed[k]);
      tmp.clear();
      std::set_intersection(cand.begin(), cand.end(), list.begin(), list.end(),
                            std::back_inserter(tmp));
      cand.swap(tmp);
    }
    if (cand.size() == 1) {
      r.detected = true;
      r.message = cand[0];
    } else {
      r.ambiguous = true;  // zero or multiple covering codewords: decoding error
    }
    return r;
  }

 private:
  std::span<const uint32_t> word_list(uint32_t pos) const {
    return {index_words_.data() + index_offsets_[pos],
            index_words_.data() + index_offsets_[pos + 1]};
  }

  SupportRevealDesign design_;
  Codebook codebook_;
  std::vector<uint8_t> reveal_;
  std::vector<size_t> index_offsets_;
  std::vector<uint32_t> index_words_;
};

}  // namespace covert
