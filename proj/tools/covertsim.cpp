// covertsim: design, simulate, and audit covert communication schemes over
// binary-input DMCs and Gaussian channels. See README.md for the config
// schema and output formats.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "covert/detector.hpp"
#include "covert/harness.hpp"
#include "covert/io.hpp"

namespace fs = std::filesystem;
using namespace covert;

namespace {

struct CliOptions {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string out_dir;
};

// A config file may be a full experiment document (schema_version present) or
// a bare channel document, which gets wrapped with defaults.
ExperimentConfig load_any_config(const CliOptions& opt) {
  const json doc = read_json_file(opt.config_path);
  ExperimentConfig cfg = [&] {
    if (doc.contains("schema_version")) {
      return parse_experiment_config(doc, fs::path(opt.config_path).parent_path().string());
    }
    ExperimentConfig c{load_channel(doc)};
    c.n_list = {10000};
    return c;
  }();
  if (opt.seed) {
    cfg.master_seed = *opt.seed;
  } else if (const char* env = std::getenv("COVERT_SEED")) {
    cfg.master_seed = std::strtoull(env, nullptr, 0);
  }
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  return cfg;
}

fs::path ensure_out_dir(const ExperimentConfig& cfg) {
  fs::path dir = cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_meta(const ExperimentConfig& cfg, const fs::path& dir, const std::string& command) {
  json meta;
  meta["command"] = command;
  meta["scheme"] = scheme_name(cfg.scheme);
  meta["master_seed"] = cfg.master_seed;
  meta["omega_kind"] = cfg.omega.name();
  if (cfg.omega.kind == OmegaSchedule::Kind::Power) meta["omega_eps"] = cfg.omega.eps;
  meta["n"] = cfg.n_list;
  meta["trials"] = cfg.trials;
  json p;
  p["xi"] = cfg.params.xi;
  p["mu"] = cfg.params.mu;
  p["nu"] = cfg.params.nu;
  p["delta"] = cfg.params.delta;
  p["epsilon"] = cfg.params.epsilon;
  p["inner_nu"] = cfg.params.inner_nu;
  p["inner_delta"] = cfg.params.inner_delta;
  p["detection_trials"] = cfg.params.detection_trials;
  p["threads"] = cfg.params.threads;
  if (cfg.params.gamma_override) p["gamma_override"] = *cfg.params.gamma_override;
  if (cfg.params.alpha_override) p["alpha_override"] = *cfg.params.alpha_override;
  if (cfg.params.budget_target) p["budget_target"] = *cfg.params.budget_target;
  meta["params"] = p;
  write_text_file((dir / (command + "_meta.json")).string(), meta.dump(2) + "\n");
}

void print_seed(const ExperimentConfig& cfg) {
  std::printf("master_seed = 0x%llX\n", (unsigned long long)cfg.master_seed);
}

int cmd_divergence(const CliOptions& opt) {
  const ExperimentConfig cfg = load_any_config(opt);
  if (const auto* g = std::get_if<GaussianPair>(&cfg.channel)) {
    const auto f = gaussian_closed_forms(*g);
    std::printf("gaussian channel: x1=%g sigma_main=%g sigma_warden=%g\n", g->x1, g->sigma_main,
                g->sigma_warden);
    std::printf("main:   kl=%.9g nats (%.9g bits)  chi2=%.9g  zeta=%.9g  llr_slope=%.9g\n",
                f.main.kl, nats_to_bits(f.main.kl), f.main.chi2, f.main.zeta, f.main.llr_slope);
    std::printf("warden: kl=%.9g nats (%.9g bits)  chi2=%.9g  zeta=%.9g  llr_slope=%.9g\n",
                f.warden.kl, nats_to_bits(f.warden.kl), f.warden.chi2, f.warden.zeta,
                f.warden.llr_slope);
    return 0;
  }
  const ChannelPair& pair = cfg.dmc();
  const auto cap = capacity_binary_input(pair);
  std::printf("main:   D(P1||P0) = %.9g nats (%.9g bits), zeta = %.9g, kappa = %.9g\n",
              pair.p1_ac_p0 ? kl(pair.p1, pair.p0) : kInf,
              pair.p1_ac_p0 ? nats_to_bits(kl(pair.p1, pair.p0)) : kInf, pair.zeta, pair.kappa);
  std::printf("main:   capacity = %.9g nats (%.9g bits) at alpha* = %.9g\n", cap.capacity_nats,
              nats_to_bits(cap.capacity_nats), cap.alpha_star);
  std::printf("warden: D(Q1||Q0) = %.9g nats, tv = %.9g, mu0 = %.9g, Q1==Q0: %s, Q1<<Q0: %s\n",
              pair.q1_ac_q0 ? kl(pair.q1, pair.q0) : kInf, tv(pair.q1, pair.q0), pair.mu0,
              pair.q1_eq_q0 ? "yes" : "no", pair.q1_ac_q0 ? "yes" : "no");
  if (pair.q1_ac_q0) {
    std::printf("warden: chi_2 = %.9g, chi_3 = %.9g, chi_4 = %.9g, eta_3 = %.9g, eta_4 = %.9g\n",
                chi_k(pair.q1, pair.q0, 2), chi_k(pair.q1, pair.q0, 3), chi_k(pair.q1, pair.q0, 4),
                eta_k(pair.q1, pair.q0, 3), eta_k(pair.q1, pair.q0, 4));
    const auto c = asymptotic_constants(pair, cfg.params.xi);
    std::printf("scaling: msg_const(xi=%g) = %.9g, key_const = %.9g, ceiling = %.9g, floor = %.9g\n",
                cfg.params.xi, c.msg_const, c.key_const, c.converse_msg_ceiling,
                c.converse_sum_floor);
  }
  const ScalingClass sc = scaling_class(pair, true);
  std::printf("class: logM in %s, logK in %s\n", scaling_law_label(sc.log_m, false).c_str(),
              scaling_law_label(sc.log_k, false).c_str());
  for (uint64_t n : cfg.n_list) {
    const double omega = cfg.omega.value(n);
    const double alpha = omega / std::sqrt(double(n));
    if (!pair.q1_ac_q0 || pair.q1_eq_q0) continue;
    const double budget = covertness_budget(n, alpha, pair.q1, pair.q0);
    std::printf("n=%llu: omega=%.6g alpha=%.6g budget=%.6g nats floor=%.6g\n",
                (unsigned long long)n, omega, alpha, budget, detection_floor(budget));
  }
  return 0;
}

int cmd_design(const CliOptions& opt) {
  const ExperimentConfig cfg = load_any_config(opt);
  print_seed(cfg);
  const fs::path dir = ensure_out_dir(cfg);
  write_meta(cfg, dir, "design");
  for (uint64_t n : cfg.n_list) {
    json out;
    if (cfg.scheme == Scheme::SpreadSpectrum) {
      const ChannelPair& pair = cfg.dmc();
      const auto sizes = spread_scheme_sizes(pair.p0, pair.p1, n, cfg.omega, cfg.params.xi);
      const auto keys = key_sizes(n, cfg.omega, cfg.params.mu, cfg.params.delta,
                                  cfg.params.epsilon);
      const auto plan = make_modulation_plan(pair.p0, pair.p1, n, cfg.omega, cfg.params.epsilon,
                                             cfg.params.inner_nu, cfg.params.inner_delta);
      out = pack_to_json(design_for(cfg, n));
      out["logM_nats"] = sizes.log_m;
      out["logK_total_nats"] = sizes.log_k_total;
      out["logK_tilde_nats"] = keys.log_k_tilde;
      out["logK_hat_nats"] = keys.log_k_hat;
      out["n_prime"] = plan.n_prime;
      out["inner_logM_nats"] = plan.inner_log_m;
      out["capacity_nats"] = sizes.capacity_nats;
    } else if (cfg.scheme == Scheme::Secrecy) {
      const SecrecyDesign s =
          secrecy_design(cfg.dmc(), n, cfg.omega, cfg.params.xi, cfg.params.mu, cfg.params.nu,
                         cfg.params.delta, cfg.params.epsilon);
      out = pack_to_json(s.base);
      out["wiretap_route"] = s.wiretap_route;
      out["logM_nats"] = s.log_m;
      out["logMprime_nats"] = s.log_m_prime;
      out["pad_key_nats"] = s.pad_key_nats;
      out["pad_key_bits"] = s.pad_key_bits;
      out["logK_total_nats"] = s.log_k_total;
    } else {
      out = pack_to_json(design_for(cfg, n));
      if (cfg.scheme == Scheme::SupportReveal) {
        const auto d = design_support_reveal(cfg.dmc(), n, cfg.omega, cfg.params.mu,
                                             cfg.params.delta);
        out["detect_threshold"] = d.detect_threshold;
      }
    }
    out["master_seed"] = cfg.master_seed;
    const std::string text = out.dump(2) + "\n";
    std::fputs(text.c_str(), stdout);
    write_text_file((dir / ("design_n" + std::to_string(n) + ".json")).string(), text);
  }
  return 0;
}

int cmd_simulate(const CliOptions& opt) {
  const ExperimentConfig cfg = load_any_config(opt);
  print_seed(cfg);
  const fs::path dir = ensure_out_dir(cfg);
  write_meta(cfg, dir, "simulate");
  for (uint64_t n : cfg.n_list) {
    const ReliabilityResult r = run_reliability(cfg, n);
    std::ostringstream os;
    write_transcript_csv(os, r);
    write_text_file((dir / ("transcript_n" + std::to_string(n) + ".csv")).string(), os.str());
    std::printf("n=%llu: P_err = %.6g (msg %.6g + fa %.6g), se = %.3g, trials = %llu+%llu\n",
                (unsigned long long)n, r.p_err, r.msg_error_rate, r.false_alarm_rate, r.p_err_se,
                (unsigned long long)r.trials_per_side, (unsigned long long)r.trials_per_side);
  }
  return 0;
}

int cmd_covertness(const CliOptions& opt) {
  const ExperimentConfig cfg = load_any_config(opt);
  print_seed(cfg);
  const fs::path dir = ensure_out_dir(cfg);
  write_meta(cfg, dir, "covertness");
  json all = json::array();
  for (uint64_t n : cfg.n_list) {
    const CovertnessReport rep = run_covertness_audit(cfg, n);
    json r;
    r["n"] = rep.n;
    r["budget_nats"] = rep.budget_nats;
    r["budget_bits"] = nats_to_bits(rep.budget_nats);
    r["divergence_bound_nats"] = rep.divergence_bound;
    r["tv_bound"] = rep.tv_bound;
    r["floor"] = rep.floor;
    r["pack"] = pack_to_json(rep.params);
    if (rep.exact_available) {
      r["exact_div_to_mixture_nats"] = rep.exact_div_to_mixture;
      r["exact_div_to_innocent_nats"] = rep.exact_div_to_innocent;
      r["exact_tv_to_mixture"] = rep.exact_tv_to_mixture;
      r["exact_floor"] = rep.exact_floor;
    }
    all.push_back(r);
    std::printf("n=%llu: budget = %.6g nats, floor = %.6g, div bound = %.6g, tv bound = %.6g\n",
                (unsigned long long)n, rep.budget_nats, rep.floor, rep.divergence_bound,
                rep.tv_bound);
  }
  write_text_file((dir / "covertness.json").string(), all.dump(2) + "\n");
  return 0;
}

int cmd_detect(const CliOptions& opt) {
  const ExperimentConfig cfg = load_any_config(opt);
  print_seed(cfg);
  const fs::path dir = ensure_out_dir(cfg);
  write_meta(cfg, dir, "detect");
  for (uint64_t n : cfg.n_list) {
    const DetectionResult res = run_detection(cfg, n);
    std::ostringstream os;
    write_roc_csv(os, res.curve);
    write_text_file((dir / ("roc_n" + std::to_string(n) + ".csv")).string(), os.str());
    std::printf("n=%llu: min(alpha+beta) = %.6g, floor = %.6g, budget = %.6g nats\n",
                (unsigned long long)n, res.curve.min_alpha_plus_beta(), res.floor,
                res.budget_nats);
  }
  return 0;
}

int cmd_chernoff(const CliOptions& opt) {
  const ExperimentConfig cfg = load_any_config(opt);
  print_seed(cfg);
  const fs::path dir = ensure_out_dir(cfg);
  write_meta(cfg, dir, "chernoff");
  for (uint64_t n : cfg.n_list) {
    const double alpha = cfg.params.alpha_override.value_or(cfg.omega.value(n) /
                                                            std::sqrt(double(n)));
    const auto rows = run_chernoff_check(n, alpha, cfg.params.mu_list, cfg.trials,
                                         cfg.master_seed, cfg.params.threads);
    std::ostringstream os;
    write_chernoff_csv(os, rows);
    write_text_file((dir / ("chernoff_n" + std::to_string(n) + ".csv")).string(), os.str());
    for (const auto& r : rows)
      std::printf("n=%llu mu=%.3g: empirical %.6g (se %.2g) <= bound %.6g, exact %.6g\n",
                  (unsigned long long)n, r.mu, r.empirical, r.empirical_se, r.bound, r.exact_tail);
  }
  return 0;
}

int cmd_sweep(const CliOptions& opt) {
  const ExperimentConfig cfg = load_any_config(opt);
  print_seed(cfg);
  const fs::path dir = ensure_out_dir(cfg);
  write_meta(cfg, dir, "sweep");
  const auto records = run_scaling_sweep(cfg);
  std::ostringstream os;
  write_sweep_csv(os, records);
  write_text_file((dir / "sweep.csv").string(), os.str());
  std::fputs(os.str().c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covert communication design and simulation"};
  app.require_subcommand(1);

  CliOptions opt;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "channel or experiment JSON")->required();
    sub->add_option("--seed", opt.seed, "master seed (fallback: env COVERT_SEED)");
    sub->add_option("--out", opt.out_dir, "output directory");
  };

  auto* divergence = app.add_subcommand("divergence", "information measures of a channel pair");
  auto* design = app.add_subcommand("design", "parameter pack for each blocklength");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo reliability with transcripts");
  auto* covertness = app.add_subcommand("covertness", "divergence budgets and bounds");
  auto* detect = app.add_subcommand("detect", "empirical warden ROC against the floor");
  auto* chernoff = app.add_subcommand("chernoff", "support-weight concentration audit");
  auto* sweep = app.add_subcommand("sweep", "scaling sweep to plot-ready CSV");
  for (auto* sub : {divergence, design, simulate, covertness, detect, chernoff, sweep})
    add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    if (divergence->parsed()) return cmd_divergence(opt);
    if (design->parsed()) return cmd_design(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
    if (covertness->parsed()) return cmd_covertness(opt);
    if (detect->parsed()) return cmd_detect(opt);
    if (chernoff->parsed()) return cmd_chernoff(opt);
    if (sweep->parsed()) return cmd_sweep(opt);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const InfeasibleError& e) {
    std::fprintf(stderr, "infeasible parameters: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
