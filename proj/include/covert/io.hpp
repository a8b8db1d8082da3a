#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "covert/errors.hpp"
#include "covert/harness.hpp"

namespace covert {

using nlohmann::json;

namespace detail {

// Fail-closed: reject any key the schema does not define so a config never
// silently runs with a misspelled or stale field.
inline void check_known_keys(const json& j, std::initializer_list<const char*> allowed,
                             const std::string& context) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) ok = true;
    if (!ok) throw ConfigError("unknown field \"" + it.key() + "\" in " + context);
  }
}

inline const json& require(const json& j, const char* key, const std::string& context) {
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError("missing field \"" + std::string(key) + "\" in " + context);
  return *it;
}

inline FiniteDistribution parse_row(const json& row, const std::string& context) {
  if (!row.is_array() || row.empty()) throw ConfigError(context + ": row must be a non-empty array");
  std::vector<double> masses;
  masses.reserve(row.size());
  double sum = 0.0;
  for (const auto& v : row) {
    if (!v.is_number()) throw ConfigError(context + ": non-numeric mass");
    const double x = v.get<double>();
    if (x < 0.0) throw ConfigError(context + ": negative mass");
    masses.push_back(x);
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError(context + ": row is not stochastic");
  // renormalize the 1e-9 slack away so downstream invariants hold exactly
  for (double& x : masses) x /= sum;
  return FiniteDistribution(std::move(masses));
}

}  // namespace detail

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

// Channel document: either
//   {"input_alphabet": [...], "innocent_index": i, "x1_index": j,
//    "main": [[...]], "warden": [[...]]}
// or {"gaussian": {"x1": r, "sigma_main": r, "sigma_warden": r}}.
inline LoadedChannel load_channel(const json& j) {
  if (j.contains("gaussian")) {
    detail::check_known_keys(j, {"gaussian"}, "channel document");
    const json& g = j.at("gaussian");
    detail::check_known_keys(g, {"x1", "sigma_main", "sigma_warden"}, "gaussian channel");
    return GaussianPair(detail::require(g, "x1", "gaussian").get<double>(),
                        detail::require(g, "sigma_main", "gaussian").get<double>(),
                        detail::require(g, "sigma_warden", "gaussian").get<double>());
  }
  detail::check_known_keys(j, {"input_alphabet", "innocent_index", "x1_index", "main", "warden"},
                           "channel document");
  const json& alphabet = detail::require(j, "input_alphabet", "channel");
  const json& main_m = detail::require(j, "main", "channel");
  const json& warden_m = detail::require(j, "warden", "channel");
  const auto innocent = detail::require(j, "innocent_index", "channel").get<int64_t>();
  const auto active = detail::require(j, "x1_index", "channel").get<int64_t>();
  if (!alphabet.is_array() || alphabet.empty()) throw ConfigError("input_alphabet must be an array");
  const auto inputs = int64_t(alphabet.size());
  if (innocent < 0 || innocent >= inputs) throw ConfigError("missing innocent symbol");
  if (active < 0 || active >= inputs || active == innocent)
    throw ConfigError("x1_index must name a non-innocent input symbol");
  if (!main_m.is_array() || int64_t(main_m.size()) != inputs)
    throw ConfigError("main matrix must have one row per input symbol");
  if (!warden_m.is_array() || int64_t(warden_m.size()) != inputs)
    throw ConfigError("warden matrix must have one row per input symbol");

  FiniteDistribution p0 = detail::parse_row(main_m[size_t(innocent)], "main row");
  FiniteDistribution p1 = detail::parse_row(main_m[size_t(active)], "main row");
  FiniteDistribution q0 = detail::parse_row(warden_m[size_t(innocent)], "warden row");
  FiniteDistribution q1 = detail::parse_row(warden_m[size_t(active)], "warden row");
  // validate remaining rows even though only x0/x1 are used
  for (int64_t r = 0; r < inputs; ++r) {
    if (r == innocent || r == active) continue;
    detail::parse_row(main_m[size_t(r)], "main row");
    detail::parse_row(warden_m[size_t(r)], "warden row");
  }
  std::vector<std::string> out_main, out_warden;
  for (size_t y = 0; y < p0.size(); ++y) out_main.push_back(std::to_string(y));
  for (size_t z = 0; z < q0.size(); ++z) out_warden.push_back(std::to_string(z));
  return ChannelPair(std::move(p0), std::move(p1), std::move(q0), std::move(q1),
                     std::move(out_main), std::move(out_warden));
}

inline ChannelPair load_channel_pair(const json& j) {
  LoadedChannel c = load_channel(j);
  if (auto* p = std::get_if<ChannelPair>(&c)) return std::move(*p);
  throw ConfigError("expected a finite channel pair, got a Gaussian channel");
}

inline OmegaSchedule parse_omega(const json& j) {
  detail::check_known_keys(j, {"kind", "eps"}, "omega schedule");
  const std::string kind = detail::require(j, "kind", "omega").get<std::string>();
  if (kind == "power") {
    return OmegaSchedule::power(detail::require(j, "eps", "omega").get<double>());
  }
  if (j.contains("eps")) throw ConfigError("eps is only valid for the power schedule");
  return OmegaSchedule::parse(kind);
}

// Experiment document (schema_version 1). Unknown fields are rejected.
inline ExperimentConfig parse_experiment_config(const json& j, const std::string& base_dir) {
  detail::check_known_keys(j,
                           {"schema_version", "channel", "scheme", "omega", "n", "trials",
                            "master_seed", "out", "params"},
                           "experiment config");
  const auto version = detail::require(j, "schema_version", "config").get<int64_t>();
  if (version != 1) throw ConfigError("unsupported schema_version");

  const json& ch = detail::require(j, "channel", "config");
  json channel_doc;
  if (ch.is_string()) {
    std::filesystem::path p = ch.get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    channel_doc = read_json_file(p.string());
  } else if (ch.is_object()) {
    channel_doc = ch;
  } else {
    throw ConfigError("channel must be a path or an inline object");
  }

  ExperimentConfig cfg{load_channel(channel_doc)};
  cfg.scheme = parse_scheme(detail::require(j, "scheme", "config").get<std::string>());
  cfg.omega = parse_omega(detail::require(j, "omega", "config"));

  const json& nlist = detail::require(j, "n", "config");
  if (!nlist.is_array() || nlist.empty()) throw ConfigError("n must be a non-empty array");
  for (const auto& v : nlist) {
    const auto n = v.get<int64_t>();
    if (n < 3) throw ConfigError("blocklengths must be >= 3");
    if (!cfg.n_list.empty() && uint64_t(n) <= cfg.n_list.back())
      throw ConfigError("n list must be strictly increasing");
    cfg.n_list.push_back(uint64_t(n));
  }
  cfg.trials = detail::require(j, "trials", "config").get<uint64_t>();
  if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<uint64_t>();
  if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();

  if (j.contains("params")) {
    const json& p = j.at("params");
    detail::check_known_keys(p,
                             {"xi", "mu", "nu", "delta", "epsilon", "inner_nu", "inner_delta",
                              "gamma_override", "alpha_override", "budget_target",
                              "detection_trials", "threshold_count", "memory_ceiling",
                              "spreading_sequences", "mu_list", "threads"},
                             "params");
    HarnessParams& hp = cfg.params;
    if (p.contains("xi")) hp.xi = p.at("xi").get<double>();
    if (p.contains("mu")) hp.mu = p.at("mu").get<double>();
    if (p.contains("nu")) hp.nu = p.at("nu").get<double>();
    if (p.contains("delta")) hp.delta = p.at("delta").get<double>();
    if (p.contains("epsilon")) hp.epsilon = p.at("epsilon").get<double>();
    if (p.contains("inner_nu")) hp.inner_nu = p.at("inner_nu").get<double>();
    if (p.contains("inner_delta")) hp.inner_delta = p.at("inner_delta").get<double>();
    if (p.contains("gamma_override")) hp.gamma_override = p.at("gamma_override").get<double>();
    if (p.contains("alpha_override")) hp.alpha_override = p.at("alpha_override").get<double>();
    if (p.contains("budget_target")) hp.budget_target = p.at("budget_target").get<double>();
    if (p.contains("detection_trials"))
      hp.detection_trials = p.at("detection_trials").get<uint64_t>();
    if (p.contains("threshold_count")) hp.threshold_count = p.at("threshold_count").get<int>();
    if (p.contains("memory_ceiling")) hp.memory_ceiling = p.at("memory_ceiling").get<uint64_t>();
    if (p.contains("spreading_sequences"))
      hp.spreading_sequences = p.at("spreading_sequences").get<uint64_t>();
    if (p.contains("mu_list")) hp.mu_list = p.at("mu_list").get<std::vector<double>>();
    if (p.contains("threads")) hp.threads = p.at("threads").get<unsigned>();
  }
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(read_json_file(path),
                                 std::filesystem::path(path).parent_path().string());
}

// Parameter-pack echo: everything needed to regenerate a run.
inline json pack_to_json(const CovertParameters& p) {
  json j;
  j["n"] = p.n;
  j["omega_kind"] = p.schedule.name();
  if (p.schedule.kind == OmegaSchedule::Kind::Power) j["omega_eps"] = p.schedule.eps;
  j["omega_n"] = p.omega_n;
  j["alpha_n"] = p.alpha_n;
  j["beta_n"] = p.beta_n;
  j["xi"] = p.xi;
  j["mu"] = p.mu;
  j["nu"] = p.nu;
  j["delta"] = p.delta;
  j["epsilon"] = p.epsilon;
  j["gamma_nats"] = p.gamma;
  j["tau_nats"] = p.tau;
  j["logM_nats"] = p.log_m;
  j["logM_bits"] = nats_to_bits(p.log_m);
  j["logK_nats"] = p.log_k;
  j["logK_bits"] = nats_to_bits(p.log_k);
  j["M"] = p.m_codewords;
  j["K"] = p.k_codebooks;
  return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
}

}  // namespace covert
