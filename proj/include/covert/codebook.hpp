#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "covert/channel.hpp"
#include "covert/distribution.hpp"
#include "covert/errors.hpp"
#include "covert/process.hpp"
#include "covert/rng.hpp"

namespace covert {

namespace stream {
// Domain-separation tags for derived random streams.
inline constexpr uint64_t kCodeword = 1;
inline constexpr uint64_t kTrial = 2;
inline constexpr uint64_t kSpreading = 3;
inline constexpr uint64_t kInnerCode = 4;
inline constexpr uint64_t kDetector = 5;
}  // namespace stream

// A length-n input sequence stored as the sorted positions carrying x1.
struct SparseCodeword {
  uint32_t n = 0;
  std::vector<uint32_t> support;
};

inline constexpr uint64_t kDefaultMemoryCeiling = uint64_t(1) << 26;  // support entries

// M x K grid of sparse codewords, i.i.d. Bernoulli(alpha_n) per position.
// Regeneration from (seed, m, k, n, alpha_n) is bit-identical: word (i, j)
// owns the counter stream keyed by (seed, kCodeword, i, j). Immutable after
// generation; storage is a CSR-style flat array.
class Codebook {
 public:
  Codebook(uint64_t m, uint64_t k, uint32_t n, double alpha_n, uint64_t seed,
           uint64_t memory_ceiling = kDefaultMemoryCeiling)
      : m_(m), k_(k), n_(n), alpha_n_(alpha_n), seed_(seed) {
    if (m_ == 0 || k_ == 0) throw ConfigError("codebook dimensions must be positive");
    const double expected = double(m_) * double(k_) * alpha_n_ * double(n_);
    if (!(expected <= double(memory_ceiling)))
      throw InfeasibleError("codebook exceeds memory ceiling");
    offsets_.reserve(m_ * k_ + 1);
    positions_.reserve(size_t(expected * 1.1) + 64);
    offsets_.push_back(0);
    for (uint64_t i = 0; i < m_; ++i) {
      for (uint64_t j = 0; j < k_; ++j) {
        CounterRng rng(seed_, {stream::kCodeword, i, j});
        rng.sample_support(n_, alpha_n_, positions_);
        offsets_.push_back(positions_.size());
      }
    }
  }

  uint64_t messages() const { return m_; }
  uint64_t keys() const { return k_; }
  uint32_t blocklength() const { return n_; }
  double alpha_n() const { return alpha_n_; }
  uint64_t seed() const { return seed_; }

  std::span<const uint32_t> support(uint64_t i, uint64_t j) const {
    const size_t w = size_t(i * k_ + j);
    return {positions_.data() + offsets_[w], positions_.data() + offsets_[w + 1]};
  }

  SparseCodeword word(uint64_t i, uint64_t j) const {
    const auto s = support(i, j);
    return {n_, {s.begin(), s.end()}};
  }

  uint64_t total_support_entries() const { return positions_.size(); }

 private:
  uint64_t m_, k_;
  uint32_t n_;
  double alpha_n_;
  uint64_t seed_;
  std::vector<size_t> offsets_;
  std::vector<uint32_t> positions_;
};

// One side of the channel (main or warden) prepared for sampling: per-symbol
// cumulative mass tables and the log-likelihood-ratio table log(row1/row0).
class DmcSide {
 public:
  DmcSide(const FiniteDistribution& row0, const FiniteDistribution& row1)
      : row0_(row0), row1_(row1) {
    if (row0.size() != row1.size()) throw ConfigError("alphabet size mismatch");
    cum0_ = cumulative(row0);
    cum1_ = cumulative(row1);
    llr_.resize(row0.size());
    for (size_t y = 0; y < row0.size(); ++y) {
      if (row1[y] == 0.0) {
        llr_[y] = -kInf;  // impossible under x1
      } else if (row0[y] == 0.0) {
        llr_[y] = kInf;  // reveals x1
      } else {
        llr_[y] = std::log(row1[y] / row0[y]);
      }
    }
  }

  size_t alphabet_size() const { return row0_.size(); }
  const FiniteDistribution& row0() const { return row0_; }
  const FiniteDistribution& row1() const { return row1_; }
  double llr(uint8_t symbol) const { return llr_[symbol]; }

  uint8_t sample(bool active, CounterRng& rng) const {
    const auto& cum = active ? cum1_ : cum0_;
    const double u = rng.next_unit();
    size_t lo = 0;
    while (lo + 1 < cum.size() && u >= cum[lo]) ++lo;
    return uint8_t(lo);
  }

  // Innocent i.i.d. block.
  void sample_innocent_block(uint32_t n, CounterRng& rng, std::vector<uint8_t>& out) const {
    out.resize(n);
    for (uint32_t i = 0; i < n; ++i) out[i] = sample(false, rng);
  }

 private:
  static std::vector<double> cumulative(const FiniteDistribution& d) {
    std::vector<double> c(d.size());
    double acc = 0.0;
    for (size_t i = 0; i < d.size(); ++i) {
      acc += d[i];
      c[i] = acc;
    }
    c.back() = 1.0;
    return c;
  }

  FiniteDistribution row0_, row1_;
  std::vector<double> cum0_, cum1_;
  std::vector<double> llr_;
};

inline DmcSide main_side(const ChannelPair& pair) { return DmcSide(pair.p0, pair.p1); }
inline DmcSide warden_side(const ChannelPair& pair) { return DmcSide(pair.q0, pair.q1); }

// Sends a sparse word through one channel side: position i is drawn from
// row1 if i is in the support, row0 otherwise.
inline std::vector<uint8_t> transmit_and_receive(const SparseCodeword& word, const DmcSide& side,
                                                 CounterRng& rng) {
  std::vector<uint8_t> out(word.n);
  size_t next = 0;
  for (uint32_t i = 0; i < word.n; ++i) {
    const bool active = next < word.support.size() && word.support[next] == i;
    if (active) ++next;
    out[i] = side.sample(active, rng);
  }
  return out;
}

// Gaussian side: y_i = x1*1{i in support} + sigma*N(0,1).
inline std::vector<double> transmit_and_receive(const SparseCodeword& word, const GaussianPair& g,
                                                bool warden, CounterRng& rng) {
  const double sigma = warden ? g.sigma_warden : g.sigma_main;
  std::vector<double> out(word.n);
  size_t next = 0;
  for (uint32_t i = 0; i < word.n; ++i) {
    const bool active = next < word.support.size() && word.support[next] == i;
    if (active) ++next;
    out[i] = (active ? g.x1 : 0.0) + sigma * rng.next_gaussian();
  }
  return out;
}

namespace detail {

// Sums LLR terms with the convention that an impossible position (-inf)
// dominates a revealing one (+inf): a codeword that cannot have produced some
// received symbol scores -inf no matter what the other positions say.
class LlrSum {
 public:
  void add(double v) {
    if (v == -kInf) {
      neg_inf_ = true;
    } else if (v == kInf) {
      pos_inf_ = true;
    } else {
      sum_ += v;
    }
  }
  double value() const {
    if (neg_inf_) return -kInf;
    if (pos_inf_) return kInf;
    return sum_;
  }

 private:
  double sum_ = 0.0;
  bool neg_inf_ = false;
  bool pos_inf_ = false;
};

}  // namespace detail

// Relative-entropy density of a received block against a codeword: only the
// x1-positions contribute, every x0-position adds exactly zero.
inline double score(const SparseCodeword& word, std::span<const uint8_t> y, const DmcSide& side) {
  if (y.size() != word.n) throw ConfigError("received block length mismatch");
  detail::LlrSum s;
  for (uint32_t pos : word.support) s.add(side.llr(y[pos]));
  return s.value();
}

// Per-position LLR profile of a received block; decode() consumes this so the
// alphabet lookups happen once per trial rather than once per codeword.
inline std::vector<double> llr_profile(std::span<const uint8_t> y, const DmcSide& side) {
  std::vector<double> prof(y.size());
  for (size_t i = 0; i < y.size(); ++i) prof[i] = side.llr(y[i]);
  return prof;
}

// Threshold decoder for key slice j: report the unique codeword scoring above
// gamma; none above means "no communication"; two or more is an ambiguous
// decode. Ambiguity is an outcome, not a fault.
inline DecodeResult decode(std::span<const double> llr_by_position, uint64_t j,
                           const Codebook& codebook, double gamma) {
  DecodeResult r;
  r.best_score = -kInf;
  uint32_t above = 0;
  for (uint64_t i = 0; i < codebook.messages(); ++i) {
    detail::LlrSum s;
    for (uint32_t pos : codebook.support(i, j)) s.add(llr_by_position[pos]);
    const double sc = s.value();
    if (sc > r.best_score) r.best_score = sc;
    if (sc > gamma) {
      if (++above > 1) {
        r.ambiguous = true;
        r.detected = false;
        // keep scanning only for the best score
      } else {
        r.message = i;
      }
    }
  }
  if (above == 1) r.detected = true;
  return r;
}

inline DecodeResult decode(std::span<const uint8_t> y, uint64_t j, const Codebook& codebook,
                           double gamma, const DmcSide& side) {
  const auto prof = llr_profile(y, side);
  return decode(prof, j, codebook, gamma);
}

}  // namespace covert
