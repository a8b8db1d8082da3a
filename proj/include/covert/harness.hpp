#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "covert/channel.hpp"
#include "covert/codebook.hpp"
#include "covert/csv.hpp"
#include "covert/detector.hpp"
#include "covert/errors.hpp"
#include "covert/process.hpp"
#include "covert/resolvability.hpp"
#include "covert/spread_spectrum.hpp"
#include "covert/trial.hpp"

namespace covert {

inline constexpr uint64_t kDefaultMasterSeed = 0x5EEDC0DE;

enum class Scheme { Resolvability, SpreadSpectrum, SupportReveal, Secrecy };

inline Scheme parse_scheme(const std::string& s) {
  if (s == "resolvability") return Scheme::Resolvability;
  if (s == "spread_spectrum") return Scheme::SpreadSpectrum;
  if (s == "appendix_g" || s == "support_reveal") return Scheme::SupportReveal;
  if (s == "secrecy") return Scheme::Secrecy;
  throw ConfigError("unknown scheme: " + s);
}

inline std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Resolvability:
      return "resolvability";
    case Scheme::SpreadSpectrum:
      return "spread_spectrum";
    case Scheme::SupportReveal:
      return "support_reveal";
    case Scheme::Secrecy:
      return "secrecy";
  }
  return "?";
}

using LoadedChannel = std::variant<ChannelPair, GaussianPair>;

// Tunables with spec'd defaults; every value is echoed back into the outputs.
struct HarnessParams {
  double xi = 0.5;
  double mu = 0.1;
  double nu = 0.1;
  double delta = 0.1;
  double epsilon = 0.1;
  double inner_nu = 0.75;
  double inner_delta = 0.1;
  std::optional<double> gamma_override;
  std::optional<double> alpha_override;
  std::optional<double> budget_target;  // pick alpha_n to hit this budget
  uint64_t detection_trials = 10000;
  int threshold_count = 41;
  uint64_t memory_ceiling = kDefaultMemoryCeiling;
  uint64_t spreading_sequences = 1024;  // materialized K~ at desk scale
  std::vector<double> mu_list{0.3, 0.5, 1.0};
  unsigned threads = 1;
};

struct ExperimentConfig {
  LoadedChannel channel;
  Scheme scheme = Scheme::Resolvability;
  OmegaSchedule omega;
  std::vector<uint64_t> n_list;
  uint64_t trials = 200;
  uint64_t master_seed = kDefaultMasterSeed;
  std::string out_dir;
  HarnessParams params;

  const ChannelPair& dmc() const {
    const auto* p = std::get_if<ChannelPair>(&channel);
    if (!p) throw ConfigError("this operation requires a finite channel pair");
    return *p;
  }
};

namespace detail {

// Runs fn(trial_id) for ids [0, count) into index-ordered slots. fn must be a
// pure function of the id (plus immutable shared state), which makes the
// result independent of the thread count.
template <typename F>
std::vector<TrialOutcome> run_trials(uint64_t count, unsigned threads, F&& fn) {
  std::vector<TrialOutcome> out(count);
  if (threads <= 1 || count < 2 * threads) {
    for (uint64_t t = 0; t < count; ++t) out[t] = fn(t);
    return out;
  }
  std::vector<std::thread> pool;
  const uint64_t chunk = (count + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const uint64_t lo = w * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (uint64_t t = lo; t < hi; ++t) out[t] = fn(t);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

inline double rate_se(double p, uint64_t trials) {
  return std::sqrt(p * (1.0 - p) / double(trials));
}

}  // namespace detail

// Designed parameters for one blocklength, with overrides applied.
inline CovertParameters design_for(const ExperimentConfig& cfg, uint64_t n) {
  const ChannelPair& pair = cfg.dmc();
  const auto& hp = cfg.params;
  CovertParameters p;
  if (cfg.scheme == Scheme::SupportReveal) {
    p = design_support_reveal(pair, n, cfg.omega, hp.mu, hp.delta).params;
  } else {
    p = design(pair, n, cfg.omega, hp.xi, hp.mu, hp.nu, hp.delta, hp.epsilon);
  }
  if (hp.budget_target) {
    p.alpha_n = solve_alpha_for_budget(pair, n, *hp.budget_target);
    p.omega_n = p.alpha_n * std::sqrt(double(n));
    p.beta_n = p.alpha_n / 2.0;
  } else if (hp.alpha_override) {
    p.alpha_n = *hp.alpha_override;
    p.omega_n = p.alpha_n * std::sqrt(double(n));
    p.beta_n = p.alpha_n / 2.0;
  }
  if (hp.gamma_override) p.gamma = *hp.gamma_override;
  return p;
}

// ---------------------------------------------------------------------------
// Reliability
// ---------------------------------------------------------------------------

struct ReliabilityResult {
  uint64_t n = 0;
  CovertParameters params;
  uint64_t trials_per_side = 0;
  double msg_error_rate = 0.0;   // message errors under T=1
  double false_alarm_rate = 0.0; // T-hat != 0 under T=0
  double p_err = 0.0;            // sum of the two components
  double p_err_se = 0.0;
  std::vector<TrialOutcome> transcript;
  bool spread_columns = false;
};

namespace detail {

inline void finalize_reliability(ReliabilityResult& r) {
  uint64_t msg_err = 0, fa = 0;
  for (const auto& o : r.transcript) {
    if (o.t_true && o.is_error()) ++msg_err;
    if (!o.t_true && o.is_error()) ++fa;
  }
  const double t = double(r.trials_per_side);
  r.msg_error_rate = double(msg_err) / t;
  r.false_alarm_rate = double(fa) / t;
  r.p_err = r.msg_error_rate + r.false_alarm_rate;
  r.p_err_se = std::sqrt(r.msg_error_rate * (1.0 - r.msg_error_rate) / t +
                         r.false_alarm_rate * (1.0 - r.false_alarm_rate) / t);
}

inline ReliabilityResult run_reliability_codebook(const ExperimentConfig& cfg, uint64_t n,
                                                  bool secrecy) {
  const ChannelPair& pair = cfg.dmc();
  const auto& hp = cfg.params;
  ReliabilityResult r;
  r.n = n;
  r.params = design_for(cfg, n);
  r.trials_per_side = cfg.trials;

  uint64_t m = uint64_t(r.params.m_codewords);
  uint64_t k = uint64_t(r.params.k_codebooks);
  uint64_t group = 1;  // words per message (secrecy randomization index)
  SecrecyDesign sec;
  bool otp_route = false;
  if (secrecy) {
    sec = secrecy_design(pair, n, cfg.omega, hp.xi, hp.mu, hp.nu, hp.delta, hp.epsilon);
    if (sec.wiretap_route) {
      m = uint64_t(sec.m_messages) * uint64_t(sec.m_prime);
      k = 1;
      group = uint64_t(sec.m_prime);
    } else {
      otp_route = true;  // plain codebook plus one-time pad on the index
    }
  }
  const Codebook cb(m, k, uint32_t(n), r.params.alpha_n, cfg.master_seed, hp.memory_ceiling);
  const DmcSide side = main_side(pair);
  const uint64_t messages = m / group;
  const double gamma = r.params.gamma;

  const auto trial_fn = [&](uint64_t id) {
    const bool t_true = id < cfg.trials;
    CounterRng rng(cfg.master_seed, {stream::kTrial, id});
    const uint64_t j = k > 1 ? rng.next_below(uint32_t(k)) : 0;
    uint64_t w = rng.next_below(uint32_t(messages));
    uint64_t pad = 0;
    if (otp_route) pad = rng.next_below(uint32_t(messages));

    std::vector<uint8_t> y;
    if (t_true) {
      uint64_t flat = w;
      if (group > 1) flat = w * group + rng.next_below(uint32_t(group));
      if (otp_route) flat = (w + pad) % messages;
      y = transmit_and_receive(cb.word(flat, j), side, rng);
    } else {
      side.sample_innocent_block(uint32_t(n), rng, y);
    }
    DecodeResult d = decode(y, j, cb, gamma, side);
    if (d.detected) {
      if (group > 1) d.message /= group;
      if (otp_route) d.message = (d.message + messages - pad) % messages;
    }
    return classify_trial(id, t_true, t_true ? std::optional<uint64_t>(w) : std::nullopt, d,
                          gamma);
  };
  r.transcript = run_trials(2 * cfg.trials, hp.threads, trial_fn);
  finalize_reliability(r);
  return r;
}

inline ReliabilityResult run_reliability_spread(const ExperimentConfig& cfg, uint64_t n) {
  const ChannelPair& pair = cfg.dmc();
  const auto& hp = cfg.params;
  ReliabilityResult r;
  r.n = n;
  r.params = design_for(cfg, n);
  r.trials_per_side = cfg.trials;
  r.spread_columns = true;

  const SpreadingCode code(uint32_t(n), r.params.alpha_n, hp.epsilon, hp.spreading_sequences,
                           cfg.master_seed);
  const ModulationPlan plan = make_modulation_plan(pair.p0, pair.p1, n, cfg.omega, hp.epsilon,
                                                   hp.inner_nu, hp.inner_delta);
  const InnerCodebook inner(plan, cfg.master_seed);
  const DmcSide side = main_side(pair);

  const auto trial_fn = [&](uint64_t id) {
    const bool t_true = id < cfg.trials;
    CounterRng rng(cfg.master_seed, {stream::kTrial, id});
    const uint64_t s_tilde = rng.next_below(uint32_t(code.size()));
    const SparseCodeword x_tilde = code.sequence(s_tilde);
    const size_t supp = x_tilde.support.size();
    std::vector<uint8_t> s_hat(supp);
    for (auto& b : s_hat) b = rng.next_bernoulli(0.5) ? 1 : 0;
    const uint64_t w = rng.next_below(uint32_t(inner.messages()));

    std::vector<uint8_t> y_window(supp);
    if (t_true) {
      const SparseCodeword x_hat = modulate(x_tilde, inner.word(w), s_hat);
      size_t next = 0;
      for (size_t j = 0; j < supp; ++j) {
        const bool active =
            next < x_hat.support.size() && x_hat.support[next] == x_tilde.support[j];
        if (active) ++next;
        y_window[j] = side.sample(active, rng);
      }
    } else {
      for (size_t j = 0; j < supp; ++j) y_window[j] = side.sample(false, rng);
    }
    const DecodeResult d = demodulate_and_decode(y_window, x_tilde, s_hat, inner, side, plan);
    TrialOutcome o = classify_trial(id, t_true, t_true ? std::optional<uint64_t>(w) : std::nullopt,
                                    d, plan.gamma_inner);
    o.support_size = supp;
    o.n_prime = plan.n_prime;
    return o;
  };
  r.transcript = run_trials(2 * cfg.trials, hp.threads, trial_fn);
  finalize_reliability(r);
  return r;
}

inline ReliabilityResult run_reliability_support_reveal(const ExperimentConfig& cfg, uint64_t n) {
  const ChannelPair& pair = cfg.dmc();
  const auto& hp = cfg.params;
  ReliabilityResult r;
  r.n = n;
  const SupportRevealDesign d = design_support_reveal(pair, n, cfg.omega, hp.mu, hp.delta);
  r.params = d.params;
  r.trials_per_side = cfg.trials;
  const SupportRevealCodec codec(d, pair, cfg.master_seed, hp.memory_ceiling);
  const DmcSide side = main_side(pair);
  const uint64_t m = codec.codebook().messages();

  const auto trial_fn = [&](uint64_t id) {
    const bool t_true = id < cfg.trials;
    CounterRng rng(cfg.master_seed, {stream::kTrial, id});
    const uint64_t w = rng.next_below(uint32_t(m));
    std::vector<uint8_t> y;
    if (t_true) {
      y = transmit_and_receive(codec.codebook().word(w, 0), side, rng);
    } else {
      side.sample_innocent_block(uint32_t(n), rng, y);
    }
    const DecodeResult dec = codec.decode(y);
    return classify_trial(id, t_true, t_true ? std::optional<uint64_t>(w) : std::nullopt, dec,
                          d.detect_threshold);
  };
  r.transcript = run_trials(2 * cfg.trials, hp.threads, trial_fn);
  finalize_reliability(r);
  return r;
}

}  // namespace detail

// Equal trial counts under T=1 and T=0; P_err is the sum of the measured
// message-error and false-alarm rates, reported separately as well.
inline ReliabilityResult run_reliability(const ExperimentConfig& cfg, uint64_t n) {
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  switch (cfg.scheme) {
    case Scheme::Resolvability:
      return detail::run_reliability_codebook(cfg, n, false);
    case Scheme::Secrecy:
      return detail::run_reliability_codebook(cfg, n, true);
    case Scheme::SpreadSpectrum:
      return detail::run_reliability_spread(cfg, n);
    case Scheme::SupportReveal:
      return detail::run_reliability_support_reveal(cfg, n);
  }
  throw ConfigError("unknown scheme");
}

// ---------------------------------------------------------------------------
// Covertness audit
// ---------------------------------------------------------------------------

struct CovertnessReport {
  uint64_t n = 0;
  CovertParameters params;
  double budget_nats = 0.0;          // n * D(Q_alpha || Q0), analytic
  double divergence_bound = kInf;    // bound on D(induced || mixture product)
  double tv_bound = kInf;            // bound on tv(induced, mixture product)
  double floor = 0.0;                // detection floor from the analytic budget
  bool exact_available = false;      // tiny-n enumeration ran
  double exact_div_to_mixture = kNaN;
  double exact_div_to_innocent = kNaN;
  double exact_tv_to_mixture = kNaN;
  double exact_floor = kNaN;
};

inline CovertnessReport run_covertness_audit(const ExperimentConfig& cfg, uint64_t n) {
  CovertnessReport rep;
  rep.n = n;
  if (const auto* g = std::get_if<GaussianPair>(&cfg.channel)) {
    // Gaussian path: budget by quadrature, total-variation bound, TV floor.
    const auto& hp = cfg.params;
    CovertParameters p;
    p.n = n;
    p.schedule = cfg.omega;
    p.omega_n = cfg.omega.value(n);
    p.alpha_n = hp.alpha_override.value_or(p.omega_n / std::sqrt(double(n)));
    p.beta_n = p.alpha_n / 2.0;
    const double weight = p.alpha_n * double(n);  // omega_n * sqrt(n)
    const double klw = gaussian_side_closed_forms(g->x1, g->sigma_warden).kl;
    const double klm = gaussian_side_closed_forms(g->x1, g->sigma_main).kl;
    p.tau = (1.0 + hp.mu) * (1.0 + hp.nu) * weight * klw;
    p.log_m = (1.0 - hp.xi) * weight * klm;
    p.m_codewords = std::ceil(std::exp(std::min(40.0, p.log_m)));
    p.k_codebooks = 1.0;
    rep.params = p;
    rep.budget_nats = covertness_budget(n, p.alpha_n, *g);
    rep.tv_bound = resolvability_tv_bound(p, *g);
    rep.floor = detection_floor_tv(std::sqrt(rep.budget_nats) + rep.tv_bound);
    return rep;
  }

  const ChannelPair& pair = cfg.dmc();
  rep.params = design_for(cfg, n);
  rep.budget_nats = covertness_budget(n, rep.params.alpha_n, pair.q1, pair.q0);
  rep.floor = detection_floor(rep.budget_nats);
  if (pair.q1_ac_q0 && rep.params.alpha_n <= 0.5) {
    rep.divergence_bound = resolvability_divergence_bound(rep.params, pair);
    rep.tv_bound = resolvability_tv_bound(rep.params, pair);
  }

  // exact enumeration when both the output space and the codebook are tiny
  double zn = 1.0;
  for (uint64_t i = 0; i < n; ++i) zn *= double(pair.q0.size());
  const double words = rep.params.m_codewords * rep.params.k_codebooks;
  if (zn <= double(kEnumerationCeiling) && words * double(n) <= 1e7) {
    const Codebook cb(uint64_t(rep.params.m_codewords), uint64_t(rep.params.k_codebooks),
                      uint32_t(n), rep.params.alpha_n, cfg.master_seed,
                      cfg.params.memory_ceiling);
    const auto induced = exact_induced_distribution(cb, pair.q0, pair.q1);
    const auto mixture = product_pmf(mix(rep.params.alpha_n, pair.q1, pair.q0), uint32_t(n));
    const auto innocent = product_pmf(pair.q0, uint32_t(n));
    rep.exact_available = true;
    rep.exact_div_to_mixture = kl_pmf(induced, mixture);
    rep.exact_div_to_innocent = kl_pmf(induced, innocent);
    rep.exact_tv_to_mixture = tv_pmf(induced, mixture);
    rep.exact_floor = detection_floor(rep.exact_div_to_innocent);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Concentration audit for the support weight
// ---------------------------------------------------------------------------

struct ChernoffRow {
  double mu = 0.0;
  double empirical = 0.0;
  double empirical_se = 0.0;
  double bound = 0.0;       // 2 exp(-mu^2 w / 3)
  double exact_tail = 0.0;  // two-sided binomial tail, sharp reference
};

inline std::vector<ChernoffRow> run_chernoff_check(uint64_t n, double alpha_n,
                                                   const std::vector<double>& mu_list,
                                                   uint64_t trials, uint64_t seed,
                                                   unsigned threads = 1) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  const double w = alpha_n * double(n);
  std::vector<uint64_t> weights(trials);
  const auto fill = [&](uint64_t lo, uint64_t hi) {
    std::vector<uint32_t> scratch;
    for (uint64_t t = lo; t < hi; ++t) {
      scratch.clear();
      CounterRng rng(seed, {stream::kTrial, t});
      rng.sample_support(uint32_t(n), alpha_n, scratch);
      weights[t] = scratch.size();
    }
  };
  if (threads <= 1) {
    fill(0, trials);
  } else {
    std::vector<std::thread> pool;
    const uint64_t chunk = (trials + threads - 1) / threads;
    for (unsigned k = 0; k < threads; ++k) {
      const uint64_t lo = k * chunk, hi = std::min(trials, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&fill, lo, hi] { fill(lo, hi); });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<ChernoffRow> rows;
  rows.reserve(mu_list.size());
  for (double mu : mu_list) {
    const double lo = (1.0 - mu) * w, hi = (1.0 + mu) * w;
    uint64_t outside = 0;
    for (uint64_t s : weights) {
      const double v = double(s);
      if (v > hi || v < lo) ++outside;
    }
    ChernoffRow row;
    row.mu = mu;
    row.empirical = double(outside) / double(trials);
    row.empirical_se = detail::rate_se(row.empirical, trials);
    row.bound = 2.0 * std::exp(-mu * mu * w / 3.0);
    // exact binomial tail with the same strict comparisons
    uint64_t k_hi = uint64_t(std::floor(hi)) + 1;
    if (double(k_hi) <= hi) ++k_hi;
    const double upper = binomial_sf(n, alpha_n, k_hi);
    double lower = 0.0;
    if (lo > 0.0) {
      int64_t k_lo = int64_t(std::ceil(lo)) - 1;
      while (k_lo >= 0 && double(k_lo) >= lo) --k_lo;
      if (k_lo >= 0) lower = binomial_cdf(n, alpha_n, uint64_t(k_lo));
    }
    row.exact_tail = upper + lower;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Scaling sweep
// ---------------------------------------------------------------------------

struct ScalingRecord {
  uint64_t n = 0;
  double omega_n = 0.0;
  double alpha_n = 0.0;
  double log_m_nats = 0.0;
  double log_k_nats = 0.0;
  double p_err_hat = kNaN;
  double p_err_se = kNaN;
  double budget_nats = 0.0;
  double ratio = kNaN;  // log M / sqrt(n * budget)
  double floor = 0.0;
};

// One record per blocklength. With trials == 0 the sweep is purely analytic
// and the error columns stay NaN.
inline std::vector<ScalingRecord> run_scaling_sweep(const ExperimentConfig& cfg) {
  const ChannelPair& pair = cfg.dmc();
  std::vector<ScalingRecord> records;
  records.reserve(cfg.n_list.size());
  for (uint64_t n : cfg.n_list) {
    ScalingRecord rec;
    rec.n = n;
    const CovertParameters p = design_for(cfg, n);
    rec.omega_n = p.omega_n;
    rec.alpha_n = p.alpha_n;
    double budget_alpha = p.alpha_n;
    switch (cfg.scheme) {
      case Scheme::Resolvability: {
        rec.log_m_nats = p.log_m;
        rec.log_k_nats = p.log_k;
        break;
      }
      case Scheme::Secrecy: {
        const SecrecyDesign s = secrecy_design(pair, n, cfg.omega, cfg.params.xi, cfg.params.mu,
                                               cfg.params.nu, cfg.params.delta,
                                               cfg.params.epsilon);
        rec.log_m_nats = s.log_m;
        rec.log_k_nats = s.log_k_total;
        break;
      }
      case Scheme::SpreadSpectrum: {
        const SpreadSchemeSizes s =
            spread_scheme_sizes(pair.p0, pair.p1, n, cfg.omega, cfg.params.xi);
        rec.log_m_nats = s.log_m;
        rec.log_k_nats = s.log_k_total;
        budget_alpha = s.beta_n;  // modulation halves the active weight
        break;
      }
      case Scheme::SupportReveal: {
        rec.log_m_nats = p.log_m;
        rec.log_k_nats = 0.0;
        break;
      }
    }
    rec.budget_nats = covertness_budget(n, budget_alpha, pair.q1, pair.q0);
    if (rec.budget_nats > 0.0)
      rec.ratio = rec.log_m_nats / std::sqrt(double(n) * rec.budget_nats);
    rec.floor = detection_floor(rec.budget_nats);
    if (cfg.trials > 0) {
      const ReliabilityResult r = run_reliability(cfg, n);
      rec.p_err_hat = r.p_err;
      rec.p_err_se = r.p_err_se;
    }
    records.push_back(rec);
  }
  return records;
}

// ---------------------------------------------------------------------------
// Detection experiment
// ---------------------------------------------------------------------------

// Warden-side H1 sampler: a full codec transmission observed through the
// warden channel, for ROC estimation.
inline std::function<std::vector<uint8_t>(uint64_t)> make_h1_sampler(const ExperimentConfig& cfg,
                                                                     uint64_t n) {
  const ChannelPair& pair = cfg.dmc();
  const auto& hp = cfg.params;
  const uint64_t seed = cfg.master_seed;
  const DmcSide warden = warden_side(pair);

  switch (cfg.scheme) {
    case Scheme::Resolvability:
    case Scheme::Secrecy: {
      const CovertParameters p = design_for(cfg, n);
      auto cb = std::make_shared<Codebook>(uint64_t(p.m_codewords), uint64_t(p.k_codebooks),
                                           uint32_t(n), p.alpha_n, seed, hp.memory_ceiling);
      return [cb, warden, seed](uint64_t t) {
        CounterRng rng(seed, {stream::kDetector, 1, t});
        const uint64_t j = cb->keys() > 1 ? rng.next_below(uint32_t(cb->keys())) : 0;
        const uint64_t w = rng.next_below(uint32_t(cb->messages()));
        return transmit_and_receive(cb->word(w, j), warden, rng);
      };
    }
    case Scheme::SpreadSpectrum: {
      const CovertParameters p = design_for(cfg, n);
      auto code = std::make_shared<SpreadingCode>(uint32_t(n), p.alpha_n, hp.epsilon,
                                                  hp.spreading_sequences, seed);
      const ModulationPlan plan = make_modulation_plan(pair.p0, pair.p1, n, cfg.omega, hp.epsilon,
                                                       hp.inner_nu, hp.inner_delta);
      auto inner = std::make_shared<InnerCodebook>(plan, seed);
      return [code, inner, warden, seed](uint64_t t) {
        CounterRng rng(seed, {stream::kDetector, 1, t});
        const SparseCodeword x_tilde = code->sequence(rng.next_below(uint32_t(code->size())));
        std::vector<uint8_t> s_hat(x_tilde.support.size());
        for (auto& b : s_hat) b = rng.next_bernoulli(0.5) ? 1 : 0;
        const uint64_t w = rng.next_below(uint32_t(inner->messages()));
        const SparseCodeword x_hat = modulate(x_tilde, inner->word(w), s_hat);
        return transmit_and_receive(x_hat, warden, rng);
      };
    }
    case Scheme::SupportReveal: {
      const SupportRevealDesign d =
          design_support_reveal(pair, n, cfg.omega, hp.mu, hp.delta);
      auto cb = std::make_shared<Codebook>(uint64_t(d.params.m_codewords), 1, uint32_t(n),
                                           d.params.alpha_n, seed, hp.memory_ceiling);
      return [cb, warden, seed](uint64_t t) {
        CounterRng rng(seed, {stream::kDetector, 1, t});
        const uint64_t w = rng.next_below(uint32_t(cb->messages()));
        return transmit_and_receive(cb->word(w, 0), warden, rng);
      };
    }
  }
  throw ConfigError("unknown scheme");
}

struct DetectionResult {
  uint64_t n = 0;
  CovertParameters params;
  double budget_nats = 0.0;
  double floor = 0.0;
  RocCurve curve;
};

inline DetectionResult run_detection(const ExperimentConfig& cfg, uint64_t n) {
  const ChannelPair& pair = cfg.dmc();
  DetectionResult res;
  res.n = n;
  res.params = design_for(cfg, n);
  const double model_alpha =
      cfg.scheme == Scheme::SpreadSpectrum ? res.params.beta_n : res.params.alpha_n;
  res.budget_nats = covertness_budget(n, model_alpha, pair.q1, pair.q0);
  res.floor = detection_floor(res.budget_nats);
  const FiniteDistribution model = mix(model_alpha, pair.q1, pair.q0);
  res.curve = empirical_roc(pair.q0, model, uint32_t(n), make_h1_sampler(cfg, n),
                            default_thresholds(n, model, pair.q0), cfg.params.detection_trials,
                            cfg.master_seed);
  return res;
}

// ---------------------------------------------------------------------------
// CSV emitters (fixed schemas)
// ---------------------------------------------------------------------------

inline void write_sweep_csv(std::ostream& os, const std::vector<ScalingRecord>& records) {
  os << "n,omega_n,alpha_n,logM_nats,logK_nats,p_err_hat,p_err_se,budget_nats,ratio,floor\n";
  for (const auto& r : records) {
    CsvRow(os)
        .field(uint64_t(r.n))
        .field(r.omega_n)
        .field(r.alpha_n)
        .field(r.log_m_nats)
        .field(r.log_k_nats)
        .field(r.p_err_hat)
        .field(r.p_err_se)
        .field(r.budget_nats)
        .field(r.ratio)
        .field(r.floor);
  }
}

inline void write_transcript_csv(std::ostream& os, const ReliabilityResult& r) {
  os << "trial_id,t_true,t_hat,w_true,w_hat,status,score_margin";
  if (r.spread_columns) os << ",support_size,n_prime";
  os << '\n';
  for (const auto& o : r.transcript) {
    CsvRow row(os);
    row.field(uint64_t(o.trial_id))
        .field(uint64_t(o.t_true ? 1 : 0))
        .field(uint64_t(o.t_hat ? 1 : 0))
        .field(o.w_true ? csv_num(uint64_t(*o.w_true)) : std::string())
        .field(o.w_hat ? csv_num(uint64_t(*o.w_hat)) : std::string())
        .field(to_string(o.status))
        .field(o.score_margin);
    if (r.spread_columns) {
      row.field(o.support_size ? csv_num(uint64_t(*o.support_size)) : std::string())
          .field(o.n_prime ? csv_num(uint64_t(*o.n_prime)) : std::string());
    }
  }
}

inline void write_roc_csv(std::ostream& os, const RocCurve& curve) {
  os << "threshold,alpha_hat,alpha_se,beta_hat,beta_se\n";
  for (const auto& p : curve.points) {
    CsvRow(os)
        .field(p.threshold)
        .field(p.alpha_hat)
        .field(p.alpha_se)
        .field(p.beta_hat)
        .field(p.beta_se);
  }
}

inline void write_chernoff_csv(std::ostream& os, const std::vector<ChernoffRow>& rows) {
  os << "mu,empirical,empirical_se,bound,exact_tail\n";
  for (const auto& r : rows) {
    CsvRow(os).field(r.mu).field(r.empirical).field(r.empirical_se).field(r.bound).field(
        r.exact_tail);
  }
}

}  // namespace covert
