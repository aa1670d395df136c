// Copyright 2026 The Doris Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "doris/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace doris {

namespace {

using nlohmann::json;

bool LogEnabled() {
  static const bool enabled = std::getenv("DORIS_LOG") != nullptr;
  return enabled;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
}

std::string ResolvePath(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

// --- CSV -------------------------------------------------------------------

std::string CsvQuote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char ch : field) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  return quoted;
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  void Row(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << CsvQuote(fields[i]);
    }
    out_ << "\r\n";
  }
  std::string Take() { return out_.str(); }

 private:
  std::ostringstream out_;
};

// --- Instance builders -------------------------------------------------------

json GetSpec(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ConfigError(std::string("config: missing \"") + key + "\"");
  return doc.at(key);
}

TabularMarkovGame BuildGame(const json& spec, const std::string& base_dir,
                            int default_channels = -1) {
  const std::string kind = spec.value("kind", "random");
  if (kind == "matching_pennies") return MakeMatchingPennies();
  if (kind == "path")
    return GameFromJson(ReadFile(ResolvePath(base_dir, spec.at("path").get<std::string>())));
  if (kind == "inline") return GameFromJson(spec.at("game").dump());
  if (kind == "random") {
    RandomGameSpec rnd;
    rnd.n_states = spec.at("n_states").get<int>();
    rnd.horizon = spec.at("horizon").get<int>();
    rnd.agent_action_counts = spec.at("actions").get<std::vector<int>>();
    rnd.seed = spec.value("seed", 0);
    rnd.reward_channels = spec.value("channels", default_channels);
    TabularMarkovGame game = GenRandomGame(rnd);
    ValidateOrThrow(game);
    return game;
  }
  throw ConfigError("unknown game kind: " + kind);
}

PolicyClass BuildPolicyClass(const json& spec, int horizon, int n_states, int n_actions) {
  const std::string kind = spec.value("kind", "random_stochastic");
  if (kind == "random_stochastic")
    return RandomStochasticPolicies(spec.at("count").get<int>(), horizon, n_states, n_actions,
                                    spec.value("seed", 0));
  if (kind == "random_deterministic")
    return RandomDeterministicPolicies(spec.at("count").get<int>(), horizon, n_states,
                                       n_actions, spec.value("seed", 0));
  if (kind == "action_mix") {
    PolicyClass cls;
    for (const auto& mix : spec.at("mixes")) {
      std::vector<double> probs = mix.get<std::vector<double>>();
      if (static_cast<int>(probs.size()) != n_actions)
        throw ConfigError("action_mix: mix size must equal the action count");
      cls.policies.push_back(TabularPolicy::ActionMix(horizon, n_states, probs));
    }
    if (cls.size() == 0) throw ConfigError("action_mix: empty mix list");
    return cls;
  }
  if (kind == "all_deterministic") {
    const long long cells = static_cast<long long>(horizon) * n_states;
    double count = std::pow(static_cast<double>(n_actions), static_cast<double>(cells));
    if (count > 64) throw ConfigError("all_deterministic: class too large (cap 64)");
    PolicyClass cls;
    for (int k = 0; k < static_cast<int>(count); ++k) {
      TabularPolicy p{horizon, n_states, n_actions, {}};
      p.probs.assign(static_cast<size_t>(horizon) * n_states * n_actions, 0.0);
      int rem = k;
      for (long long cell = 0; cell < cells; ++cell) {
        p.probs[cell * n_actions + rem % n_actions] = 1.0;
        rem /= n_actions;
      }
      cls.policies.push_back(std::move(p));
    }
    return cls;
  }
  if (kind == "explicit") {
    PolicyClass cls;
    for (const auto& table : spec.at("policies")) {
      TabularPolicy p{horizon, n_states, n_actions, table.get<std::vector<double>>()};
      if (!IsValidPolicy(p)) throw ConfigError("explicit policy table is not row-stochastic");
      cls.policies.push_back(std::move(p));
    }
    if (cls.size() == 0) throw ConfigError("explicit: empty policy list");
    return cls;
  }
  throw ConfigError("unknown policy class kind: " + kind);
}

ClassBuildSpec BuildClassSpec(const json& doc) {
  ClassBuildSpec spec;
  if (doc.contains("classes")) {
    const json& c = doc.at("classes");
    spec.distractors = c.value("distractors", spec.distractors);
    spec.perturb_scale = c.value("perturb_scale", spec.perturb_scale);
    spec.seed = c.value("seed", spec.seed);
  }
  return spec;
}

OpponentModel BuildOpponent(const json& doc) {
  if (!doc.contains("opponent")) return OpponentModel{};
  const json& o = doc.at("opponent");
  return ParseOpponentModel(o.value("kind", "alternating"),
                            o.value("schedule", std::vector<int>{}), o.value("id", 0));
}

CmdpInstance BuildCmdp(const json& doc, const std::string& base_dir) {
  const json spec = GetSpec(doc, "instance");
  const std::string kind = spec.value("kind", "action_tradeoff");
  CmdpInstance inst;
  if (kind == "action_tradeoff") {
    inst = MakeActionTradeoffCmdp(spec.value("horizon", 3), spec.value("threshold", 1.8));
  } else if (kind == "path") {
    inst = CmdpFromJson(ReadFile(ResolvePath(base_dir, spec.at("path").get<std::string>())));
  } else if (kind == "inline") {
    inst = CmdpFromJson(spec.at("cmdp").dump());
  } else if (kind == "random") {
    json game_spec = spec;
    game_spec["channels"] = 2;
    inst.mdp = BuildGame(game_spec, base_dir, 2);
    inst.threshold = spec.at("threshold").get<double>();
  } else {
    throw ConfigError("unknown cmdp instance kind: " + kind);
  }
  if (spec.contains("threshold")) inst.threshold = spec.at("threshold").get<double>();
  if (spec.contains("slater_slack")) inst.slater_slack = spec.at("slater_slack").get<double>();
  if (spec.contains("slater_witness"))
    inst.slater_witness = spec.at("slater_witness").get<int>();
  ValidationReport report = ValidateCmdp(inst);
  if (!report.ok()) throw ConfigError("invalid cmdp instance:\n" + report.ToString());
  return inst;
}

VmdpInstance BuildVmdp(const json& doc, const std::string& base_dir) {
  const json spec = GetSpec(doc, "instance");
  const std::string kind = spec.value("kind", "segment_tradeoff");
  VmdpInstance inst;
  if (kind == "segment_tradeoff") {
    inst = MakeSegmentTradeoffVmdp(spec.value("horizon", 2), spec.value("center_low", 0.9),
                                   spec.value("center_high", 1.1));
  } else if (kind == "path") {
    inst = VmdpFromJson(ReadFile(ResolvePath(base_dir, spec.at("path").get<std::string>())));
  } else if (kind == "inline") {
    inst = VmdpFromJson(spec.at("vmdp").dump());
  } else if (kind == "random") {
    const int dim = spec.at("dim").get<int>();
    json game_spec = spec;
    game_spec["channels"] = dim;
    inst.mdp = BuildGame(game_spec, base_dir, dim);
    inst.reward_dim = dim;
    inst.target.vertices = spec.at("target_vertices").get<std::vector<std::vector<double>>>();
  } else {
    throw ConfigError("unknown vmdp instance kind: " + kind);
  }
  if (spec.contains("target_vertices"))
    inst.target.vertices = spec.at("target_vertices").get<std::vector<std::vector<double>>>();
  ValidationReport report = ValidateVmdp(inst);
  if (!report.ok()) throw ConfigError("invalid vmdp instance:\n" + report.ToString());
  return inst;
}

BuiltClasses BuildOrLoadClasses(const json& doc, const std::string& base_dir,
                                const TabularMarkovGame& game, const PolicyClass& pi,
                                const PolicyClass& pi_prime, int channel) {
  if (doc.contains("classes") && doc.at("classes").value("kind", "builder") == "path")
    return ClassesFromJson(
        ReadFile(ResolvePath(base_dir, doc.at("classes").at("path").get<std::string>())));
  return BuildRealizableClasses(game, pi, pi_prime, game.RewardTable(channel),
                                BuildClassSpec(doc));
}

// --- Summary helpers --------------------------------------------------------

json QuantileSeries(const std::vector<std::vector<double>>& per_seed_series) {
  // per_seed_series[seed][t]
  json out;
  if (per_seed_series.empty()) return out;
  const size_t horizon = per_seed_series[0].size();
  std::vector<double> median(horizon), q25(horizon), q75(horizon);
  std::vector<double> column(per_seed_series.size());
  for (size_t t = 0; t < horizon; ++t) {
    for (size_t s = 0; s < per_seed_series.size(); ++s) column[s] = per_seed_series[s][t];
    median[t] = Quantile(column, 0.5);
    q25[t] = Quantile(column, 0.25);
    q75[t] = Quantile(column, 0.75);
  }
  out["median"] = median;
  out["q25"] = q25;
  out["q75"] = q75;
  return out;
}

json FinalStat(const std::vector<double>& per_seed) {
  json out;
  out["per_seed"] = per_seed;
  out["median"] = Quantile(per_seed, 0.5);
  return out;
}

struct ModeOutput {
  std::vector<std::string> csv_texts;               // one per seed
  json summary;
};

// --- Parameter provenance ----------------------------------------------------

ParamReport EtaReport(double eta, int pi_size, int episodes, double v_max) {
  std::ostringstream f;
  f << "sqrt(log(|Pi|)/(K*Vmax^2)) = sqrt(log(" << pi_size << ")/(" << episodes << "*"
    << v_max * v_max << ")) [hedge rate]";
  return {"eta", eta, f.str()};
}

ParamReport BetaReport(const std::string& name, double beta, double c, double v_max,
                       int union_size, int episodes, int horizon, double multiplicity,
                       double delta, const std::string& schedule) {
  std::ostringstream f;
  f << "c*Vmax^2*log(|F u G|*K*H*mult/delta) = " << c << "*" << v_max * v_max << "*log("
    << union_size << "*" << episodes << "*" << horizon << "*" << multiplicity << "/" << delta
    << ") [" << schedule << "]";
  return {name, beta, f.str()};
}

}  // namespace

double Quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DorisError("Quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double rank = q * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(rank);
  const size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

ExperimentConfig ParseExperimentConfig(const std::string& json_text,
                                       const std::string& config_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid json: ") + e.what());
  }
  ExperimentConfig cfg;
  cfg.raw = json_text;
  cfg.config_dir = config_dir;
  cfg.mode = doc.value("mode", "");
  if (cfg.mode != "decentralized" && cfg.mode != "selfplay" && cfg.mode != "cmdp" &&
      cfg.mode != "vmdp")
    throw ConfigError("config: mode must be decentralized | selfplay | cmdp | vmdp");
  cfg.episodes = doc.value("episodes", 100);
  if (cfg.episodes < 1) throw ConfigError("config: episodes must be >= 1");
  cfg.seed = doc.value("seed", 1);
  cfg.seed_count = doc.value("seeds", 1);
  if (cfg.seed_count < 1) throw ConfigError("config: seeds must be >= 1");
  cfg.delta = doc.value("delta", 0.05);
  if (!(cfg.delta > 0.0 && cfg.delta <= 1.0)) throw ConfigError("config: delta outside (0, 1]");
  cfg.c = doc.value("c", 1.0);
  cfg.threads = doc.value("threads", 1);
  cfg.out_dir = doc.value("out", "out");
  if (doc.contains("overrides")) {
    const json& o = doc.at("overrides");
    cfg.eta = o.value("eta", -1.0);
    cfg.beta = o.value("beta", -1.0);
    cfg.alpha = o.value("alpha", -1.0);
    cfg.chi = o.value("chi", -1.0);
    cfg.alpha_scale = o.value("alpha_scale", -1.0);
  }
  // Referenced files must exist up front.
  for (const char* key : {"game", "instance"}) {
    if (doc.contains(key) && doc.at(key).is_object() &&
        doc.at(key).value("kind", "") == "path") {
      std::string p = ResolvePath(config_dir, doc.at(key).at("path").get<std::string>());
      if (!std::filesystem::exists(p)) throw ConfigError("referenced file missing: " + p);
    }
  }
  if (doc.contains("classes") && doc.at("classes").value("kind", "builder") == "path") {
    std::string p = ResolvePath(config_dir, doc.at("classes").at("path").get<std::string>());
    if (!std::filesystem::exists(p)) throw ConfigError("referenced file missing: " + p);
  }
  return cfg;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  return ParseExperimentConfig(ReadFile(path),
                               std::filesystem::path(path).parent_path().string());
}

void ApplyOverride(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  auto as_double = [&]() { return std::stod(value); };
  if (key == "episodes")
    cfg.episodes = std::stoi(value);
  else if (key == "seed")
    cfg.seed = std::stoull(value);
  else if (key == "seeds")
    cfg.seed_count = std::stoi(value);
  else if (key == "delta")
    cfg.delta = as_double();
  else if (key == "c")
    cfg.c = as_double();
  else if (key == "eta")
    cfg.eta = as_double();
  else if (key == "beta")
    cfg.beta = as_double();
  else if (key == "alpha")
    cfg.alpha = as_double();
  else if (key == "chi")
    cfg.chi = as_double();
  else if (key == "alpha_scale")
    cfg.alpha_scale = as_double();
  else if (key == "threads")
    cfg.threads = std::stoi(value);
  else if (key == "out")
    cfg.out_dir = value;
  else
    throw ConfigError("unknown override key: " + key);
  if (cfg.episodes < 1 || cfg.seed_count < 1 || !(cfg.delta > 0.0 && cfg.delta <= 1.0))
    throw ConfigError("override leaves config invalid");
}

// --- Named instances ---------------------------------------------------------

CmdpInstance MakeActionTradeoffCmdp(int horizon, double threshold) {
  CmdpInstance inst;
  TabularMarkovGame& mdp = inst.mdp;
  mdp.n_states = 2;
  mdp.horizon = horizon;
  mdp.start_state = 0;
  mdp.agent_action_counts = {2};
  const int cells = 2 * 2;  // states x actions
  mdp.transitions.assign(static_cast<size_t>(horizon) * cells * 2, 0.0);
  mdp.rewards.assign(2, std::vector<double>(static_cast<size_t>(horizon) * cells, 0.0));
  for (int h = 0; h < horizon; ++h)
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) {
        const size_t row = (static_cast<size_t>(h) * 2 + s) * 2 + a;
        mdp.transitions[row * 2 + ((s + a) % 2)] = 1.0;  // action 1 toggles the state
        mdp.rewards[0][row] = (a == 0) ? 1.0 : 0.0;      // reward channel
        mdp.rewards[1][row] = (a == 1) ? 1.0 : 0.0;      // utility channel
      }
  inst.threshold = threshold;
  return inst;
}

VmdpInstance MakeSegmentTradeoffVmdp(int horizon, double center_low, double center_high) {
  VmdpInstance inst;
  TabularMarkovGame& mdp = inst.mdp;
  mdp.n_states = 2;
  mdp.horizon = horizon;
  mdp.start_state = 0;
  mdp.agent_action_counts = {2};
  const int cells = 2 * 2;
  mdp.transitions.assign(static_cast<size_t>(horizon) * cells * 2, 0.0);
  mdp.rewards.assign(2, std::vector<double>(static_cast<size_t>(horizon) * cells, 0.0));
  for (int h = 0; h < horizon; ++h)
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) {
        const size_t row = (static_cast<size_t>(h) * 2 + s) * 2 + a;
        mdp.transitions[row * 2 + ((s + a) % 2)] = 1.0;
        mdp.rewards[0][row] = (a == 0) ? 1.0 : 0.0;
        mdp.rewards[1][row] = (a == 1) ? 1.0 : 0.0;
      }
  inst.reward_dim = 2;
  inst.target.vertices = {{center_low, center_high}, {center_high, center_low}};
  return inst;
}

// --- Mode runners ------------------------------------------------------------

namespace {

ModeOutput RunDecentralizedMode(const ExperimentConfig& cfg) {
  const json doc = json::parse(cfg.raw);
  TabularMarkovGame game = BuildGame(GetSpec(doc, "game"), cfg.config_dir, -1);
  if (game.NumAgents() != 2) throw ConfigError("decentralized mode needs a two-agent game");
  ValidateOrThrow(game);
  PolicyClass pi = BuildPolicyClass(GetSpec(doc, "policy_class"), game.horizon, game.n_states,
                                    game.PlayerActions());
  PolicyClass pi_prime = BuildPolicyClass(GetSpec(doc, "opponent_class"), game.horizon,
                                          game.n_states, game.OpponentActions());
  OpponentModel opponent = BuildOpponent(doc);
  BuiltClasses classes = BuildOrLoadClasses(doc, cfg.config_dir, game, pi, pi_prime, 0);

  std::vector<DecentralizedResult> results(cfg.seed_count);
  const int inner_threads = cfg.seed_count > 1 ? 1 : cfg.threads;
  ParallelFor(cfg.seed_count, cfg.seed_count > 1 ? cfg.threads : 1, [&](int i) {
    DorisConfig dcfg;
    dcfg.episodes = cfg.episodes;
    dcfg.delta = cfg.delta;
    dcfg.c = cfg.c;
    dcfg.eta = cfg.eta;
    dcfg.beta = cfg.beta;
    dcfg.seed = cfg.seed + static_cast<uint64_t>(i);
    dcfg.threads = inner_threads;
    results[i] = RunDecentralized(game, pi, pi_prime, classes, opponent, dcfg);
    if (LogEnabled())
      std::fprintf(stderr, "[doris] decentralized seed %llu done\n",
                   static_cast<unsigned long long>(dcfg.seed));
  });

  ModeOutput out;
  std::vector<std::vector<double>> regret_series, optimism_series;
  std::vector<double> final_regret, optimism_freq, calibrated_c, witness_ratio, entropy;
  for (const DecentralizedResult& r : results) {
    CsvWriter csv;
    std::vector<std::string> header{"t", "mu_id", "nu_id"};
    for (int m = 0; m < pi.size(); ++m) header.push_back("vbar_" + std::to_string(m));
    for (const char* col : {"vbar_mean", "true_value", "regret_to_date", "optimism_frac",
                            "decomp_1", "decomp_2", "decomp_3", "decomp_4"})
      header.push_back(col);
    csv.Row(header);
    std::vector<double> regret_row, optimism_row;
    for (const DecentralizedRecord& rec : r.records) {
      std::vector<std::string> row{std::to_string(rec.t), std::to_string(rec.mu_id),
                                   std::to_string(rec.nu_id)};
      for (double v : rec.vbar) row.push_back(FormatDouble(v));
      row.push_back(FormatDouble(rec.vbar_mean));
      row.push_back(FormatDouble(rec.true_value));
      row.push_back(FormatDouble(rec.regret_to_date));
      row.push_back(FormatDouble(rec.optimism_frac));
      for (double term : rec.decomposition) row.push_back(FormatDouble(term));
      csv.Row(row);
      regret_row.push_back(rec.regret_to_date);
      optimism_row.push_back(rec.optimism_frac);
    }
    out.csv_texts.push_back(csv.Take());
    regret_series.push_back(std::move(regret_row));
    optimism_series.push_back(std::move(optimism_row));
    final_regret.push_back(r.final_regret);
    optimism_freq.push_back(r.optimism_frequency);
    calibrated_c.push_back(r.calibrated_c);
    witness_ratio.push_back(r.witness_residual_ratio);
    entropy.push_back(r.final_entropy);
  }

  const double multiplicity =
      static_cast<double>(pi.size()) * (opponent.IsAdaptive() ? pi_prime.size() : 1);
  json params = json::array();
  ParamReport eta_rep = EtaReport(results[0].eta, pi.size(), cfg.episodes, game.VMax());
  ParamReport beta_rep = BetaReport(
      "beta", results[0].beta, cfg.c, game.VMax(), classes.UnionSize(), cfg.episodes,
      game.horizon, multiplicity, cfg.delta,
      opponent.IsAdaptive() ? "adaptive-opponent schedule" : "oblivious-opponent schedule");
  for (const ParamReport& p : {eta_rep, beta_rep})
    params.push_back({{"name", p.name}, {"value", p.value}, {"formula", p.formula}});

  out.summary["params"] = params;
  out.summary["per_episode"]["regret_to_date"] = QuantileSeries(regret_series);
  out.summary["per_episode"]["optimism_frac"] = QuantileSeries(optimism_series);
  out.summary["final"]["regret"] = FinalStat(final_regret);
  out.summary["final"]["optimism_frequency"] = FinalStat(optimism_freq);
  out.summary["final"]["calibrated_c"] = FinalStat(calibrated_c);
  out.summary["final"]["witness_residual_ratio"] = FinalStat(witness_ratio);
  out.summary["final"]["hyperpolicy_entropy"] = FinalStat(entropy);
  return out;
}

ModeOutput RunSelfplayMode(const ExperimentConfig& cfg) {
  const json doc = json::parse(cfg.raw);
  TabularMarkovGame game = BuildGame(GetSpec(doc, "game"), cfg.config_dir, -1);
  ValidateOrThrow(game);
  const int n = game.NumAgents();
  if (game.NumChannels() != n) throw ConfigError("selfplay needs one reward channel per agent");

  std::vector<PolicyClass> agent_classes;
  if (doc.contains("agent_policy_classes")) {
    const json& list = doc.at("agent_policy_classes");
    if (static_cast<int>(list.size()) != n)
      throw ConfigError("agent_policy_classes must have one entry per agent");
    for (int i = 0; i < n; ++i)
      agent_classes.push_back(BuildPolicyClass(list.at(i), game.horizon, game.n_states,
                                               game.agent_action_counts[i]));
  } else {
    for (int i = 0; i < n; ++i)
      agent_classes.push_back(BuildPolicyClass(GetSpec(doc, "policy_class"), game.horizon,
                                               game.n_states, game.agent_action_counts[i]));
  }

  // Per-agent classes against the meta-opponent class of the others, in the
  // agent's own view.
  ClassBuildSpec class_spec = BuildClassSpec(doc);
  std::vector<BuiltClasses> value_classes;
  for (int i = 0; i < n; ++i) {
    TabularMarkovGame view = ViewForAgent(game, i);
    PolicyClass meta = MetaOpponentClass(agent_classes, i);
    value_classes.push_back(
        BuildRealizableClasses(view, agent_classes[i], meta, view.RewardTable(0), class_spec));
  }

  std::vector<SelfplayResult> results(cfg.seed_count);
  const int inner_threads = cfg.seed_count > 1 ? 1 : cfg.threads;
  ParallelFor(cfg.seed_count, cfg.seed_count > 1 ? cfg.threads : 1, [&](int i) {
    DorisConfig dcfg;
    dcfg.episodes = cfg.episodes;
    dcfg.delta = cfg.delta;
    dcfg.c = cfg.c;
    dcfg.eta = cfg.eta;
    dcfg.beta = cfg.beta;
    dcfg.seed = cfg.seed + static_cast<uint64_t>(i);
    dcfg.threads = inner_threads;
    results[i] = RunSelfplay(game, agent_classes, value_classes, dcfg);
    if (LogEnabled())
      std::fprintf(stderr, "[doris] selfplay seed %llu done\n",
                   static_cast<unsigned long long>(dcfg.seed));
  });

  ModeOutput out;
  std::vector<std::vector<std::vector<double>>> regret_series(n);
  std::vector<std::vector<double>> gaps(n);
  std::vector<double> gap_max;
  for (const SelfplayResult& r : results) {
    CsvWriter csv;
    std::vector<std::string> header{"t"};
    for (int i = 0; i < n; ++i) header.push_back("mu_id_" + std::to_string(i));
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < agent_classes[i].size(); ++m)
        header.push_back("vbar_" + std::to_string(i) + "_" + std::to_string(m));
    for (int i = 0; i < n; ++i) header.push_back("true_value_" + std::to_string(i));
    for (int i = 0; i < n; ++i) header.push_back("regret_to_date_" + std::to_string(i));
    for (int i = 0; i < n; ++i) header.push_back("optimism_frac_" + std::to_string(i));
    csv.Row(header);
    std::vector<std::vector<double>> regret_rows(n);
    for (const SelfplayRecord& rec : r.records) {
      std::vector<std::string> row{std::to_string(rec.t)};
      for (int i = 0; i < n; ++i) row.push_back(std::to_string(rec.profile[i]));
      for (int i = 0; i < n; ++i)
        for (double v : rec.vbar[i]) row.push_back(FormatDouble(v));
      for (int i = 0; i < n; ++i) row.push_back(FormatDouble(rec.true_value[i]));
      for (int i = 0; i < n; ++i) {
        row.push_back(FormatDouble(rec.regret_to_date[i]));
        regret_rows[i].push_back(rec.regret_to_date[i]);
      }
      for (int i = 0; i < n; ++i) row.push_back(FormatDouble(rec.optimism_frac[i]));
      csv.Row(row);
    }
    out.csv_texts.push_back(csv.Take());
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      regret_series[i].push_back(std::move(regret_rows[i]));
      gaps[i].push_back(r.cce_gaps[i]);
      worst = std::max(worst, r.cce_gaps[i]);
    }
    gap_max.push_back(worst);
  }

  json params = json::array();
  for (int i = 0; i < n; ++i) {
    ParamReport eta_rep =
        EtaReport(results[0].etas[i], agent_classes[i].size(), cfg.episodes, game.VMax());
    eta_rep.name = "eta_" + std::to_string(i);
    int meta_count = 1;
    for (int j = 0; j < n; ++j)
      if (j != i) meta_count *= agent_classes[j].size();
    ParamReport beta_rep = BetaReport(
        "beta_" + std::to_string(i), results[0].betas[i], cfg.c, game.VMax(),
        value_classes[i].UnionSize(), cfg.episodes, game.horizon,
        static_cast<double>(agent_classes[i].size()) * meta_count * n, cfg.delta,
        "self-play schedule");
    params.push_back({{"name", eta_rep.name}, {"value", eta_rep.value}, {"formula", eta_rep.formula}});
    params.push_back(
        {{"name", beta_rep.name}, {"value", beta_rep.value}, {"formula", beta_rep.formula}});
  }
  out.summary["params"] = params;
  for (int i = 0; i < n; ++i) {
    out.summary["per_episode"]["regret_to_date_" + std::to_string(i)] =
        QuantileSeries(regret_series[i]);
    out.summary["final"]["cce_gap_" + std::to_string(i)] = FinalStat(gaps[i]);
  }
  out.summary["final"]["cce_gap_max"] = FinalStat(gap_max);
  return out;
}

ModeOutput RunCmdpMode(const ExperimentConfig& cfg) {
  const json doc = json::parse(cfg.raw);
  CmdpInstance inst = BuildCmdp(doc, cfg.config_dir);
  PolicyClass pi = BuildPolicyClass(GetSpec(doc, "policy_class"), inst.mdp.horizon,
                                    inst.mdp.n_states, inst.mdp.PlayerActions());
  ClassBuildSpec class_spec = BuildClassSpec(doc);
  BuiltClasses reward_classes =
      BuildRealizableClassesSingle(inst.mdp, pi, inst.mdp.RewardTable(0), class_spec);
  ClassBuildSpec utility_spec = class_spec;
  utility_spec.seed = class_spec.seed + 1;
  BuiltClasses utility_classes =
      BuildRealizableClassesSingle(inst.mdp, pi, inst.mdp.RewardTable(1), utility_spec);

  std::vector<CmdpResult> results(cfg.seed_count);
  const int inner_threads = cfg.seed_count > 1 ? 1 : cfg.threads;
  ParallelFor(cfg.seed_count, cfg.seed_count > 1 ? cfg.threads : 1, [&](int i) {
    CmdpConfig ccfg;
    ccfg.episodes = cfg.episodes;
    ccfg.delta = cfg.delta;
    ccfg.c = cfg.c;
    ccfg.eta = cfg.eta;
    ccfg.beta = cfg.beta;
    ccfg.alpha = cfg.alpha;
    ccfg.chi = cfg.chi;
    ccfg.seed = cfg.seed + static_cast<uint64_t>(i);
    ccfg.threads = inner_threads;
    results[i] = RunConstrained(inst, pi, reward_classes, utility_classes, ccfg);
    if (LogEnabled())
      std::fprintf(stderr, "[doris] cmdp seed %llu done\n",
                   static_cast<unsigned long long>(ccfg.seed));
  });

  ModeOutput out;
  std::vector<std::vector<double>> regret_series, violation_series;
  std::vector<double> final_regret, final_violation, telescoping_lhs, telescoping_rhs, dual_ok;
  for (const CmdpResult& r : results) {
    CsvWriter csv;
    std::vector<std::string> header{"t", "mu_id", "dual"};
    for (int m = 0; m < pi.size(); ++m) header.push_back("vbar_r_" + std::to_string(m));
    for (int m = 0; m < pi.size(); ++m) header.push_back("vbar_g_" + std::to_string(m));
    for (const char* col : {"shortfall", "true_reward", "regret_to_date", "violation_to_date",
                            "optimism_frac_reward", "optimism_frac_utility"})
      header.push_back(col);
    csv.Row(header);
    std::vector<double> regret_row, violation_row;
    for (const CmdpRecord& rec : r.records) {
      std::vector<std::string> row{std::to_string(rec.t), std::to_string(rec.mu_id),
                                   FormatDouble(rec.dual)};
      for (double v : rec.vbar_reward) row.push_back(FormatDouble(v));
      for (double v : rec.vbar_utility) row.push_back(FormatDouble(v));
      row.push_back(FormatDouble(rec.shortfall));
      row.push_back(FormatDouble(rec.true_reward));
      row.push_back(FormatDouble(rec.regret_to_date));
      row.push_back(FormatDouble(rec.violation_to_date));
      row.push_back(FormatDouble(rec.optimism_frac_reward));
      row.push_back(FormatDouble(rec.optimism_frac_utility));
      csv.Row(row);
      regret_row.push_back(rec.regret_to_date);
      violation_row.push_back(rec.violation_to_date);
    }
    out.csv_texts.push_back(csv.Take());
    regret_series.push_back(std::move(regret_row));
    violation_series.push_back(std::move(violation_row));
    final_regret.push_back(r.final_regret);
    final_violation.push_back(r.final_violation);
    telescoping_lhs.push_back(r.telescoping_lhs);
    telescoping_rhs.push_back(r.telescoping_rhs);
    dual_ok.push_back(r.dual_in_range ? 1.0 : 0.0);
  }

  json params = json::array();
  const CmdpResult& first = results[0];
  params.push_back({{"name", "eta"},
                    {"value", first.eta},
                    {"formula", "sqrt(log(|Pi|)/(K*(chi+1)^2*H^2)) [lagrangian hedge rate]"}});
  params.push_back({{"name", "alpha"},
                    {"value", first.alpha},
                    {"formula", "1/sqrt(K) [dual gradient step]"}});
  params.push_back({{"name", "chi"},
                    {"value", first.chi},
                    {"formula", "2H/slater_slack [dual cap]"}});
  ParamReport br = BetaReport("beta_reward", first.beta_reward, cfg.c, inst.mdp.VMax(),
                              reward_classes.UnionSize(), cfg.episodes, inst.mdp.horizon,
                              pi.size(), cfg.delta, "single-agent schedule");
  ParamReport bg = BetaReport("beta_utility", first.beta_utility, cfg.c, inst.mdp.VMax(),
                              utility_classes.UnionSize(), cfg.episodes, inst.mdp.horizon,
                              pi.size(), cfg.delta, "single-agent schedule");
  for (const ParamReport& p : {br, bg})
    params.push_back({{"name", p.name}, {"value", p.value}, {"formula", p.formula}});
  out.summary["params"] = params;
  out.summary["per_episode"]["regret_to_date"] = QuantileSeries(regret_series);
  out.summary["per_episode"]["violation_to_date"] = QuantileSeries(violation_series);
  out.summary["final"]["regret"] = FinalStat(final_regret);
  out.summary["final"]["violation"] = FinalStat(final_violation);
  out.summary["final"]["telescoping_lhs"] = FinalStat(telescoping_lhs);
  out.summary["final"]["telescoping_rhs"] = FinalStat(telescoping_rhs);
  out.summary["final"]["dual_in_range"] = FinalStat(dual_ok);
  return out;
}

ModeOutput RunVmdpMode(const ExperimentConfig& cfg) {
  const json doc = json::parse(cfg.raw);
  VmdpInstance inst = BuildVmdp(doc, cfg.config_dir);
  PolicyClass pi = BuildPolicyClass(GetSpec(doc, "policy_class"), inst.mdp.horizon,
                                    inst.mdp.n_states, inst.mdp.PlayerActions());
  VectorBuiltClasses classes = BuildVectorClasses(inst, pi, BuildClassSpec(doc));

  std::vector<VmdpResult> results(cfg.seed_count);
  const int inner_threads = cfg.seed_count > 1 ? 1 : cfg.threads;
  ParallelFor(cfg.seed_count, cfg.seed_count > 1 ? cfg.threads : 1, [&](int i) {
    VmdpConfig vcfg;
    vcfg.episodes = cfg.episodes;
    vcfg.delta = cfg.delta;
    vcfg.c = cfg.c;
    vcfg.eta = cfg.eta;
    vcfg.beta = cfg.beta;
    vcfg.alpha_scale = cfg.alpha_scale;
    vcfg.seed = cfg.seed + static_cast<uint64_t>(i);
    vcfg.threads = inner_threads;
    results[i] = RunApproachability(inst, pi, classes, vcfg);
    if (LogEnabled())
      std::fprintf(stderr, "[doris] vmdp seed %llu done\n",
                   static_cast<unsigned long long>(vcfg.seed));
  });

  ModeOutput out;
  std::vector<std::vector<double>> distance_series;
  std::vector<double> final_distance, excess_distance, theta_ok;
  for (const VmdpResult& r : results) {
    CsvWriter csv;
    std::vector<std::string> header{"t", "mu_id"};
    for (int j = 0; j < inst.reward_dim; ++j) header.push_back("theta_" + std::to_string(j));
    for (int j = 0; j < inst.reward_dim; ++j) header.push_back("vunder_" + std::to_string(j));
    header.push_back("distance_to_date");
    header.push_back("pessimism_frac");
    csv.Row(header);
    std::vector<double> distance_row;
    for (const VmdpRecord& rec : r.records) {
      std::vector<std::string> row{std::to_string(rec.t), std::to_string(rec.mu_id)};
      for (double v : rec.theta) row.push_back(FormatDouble(v));
      for (double v : rec.vunder_played) row.push_back(FormatDouble(v));
      row.push_back(FormatDouble(rec.distance_to_date));
      row.push_back(FormatDouble(rec.pessimism_frac));
      csv.Row(row);
      distance_row.push_back(rec.distance_to_date);
    }
    out.csv_texts.push_back(csv.Take());
    distance_series.push_back(std::move(distance_row));
    final_distance.push_back(r.final_distance);
    excess_distance.push_back(r.final_distance - r.best_single_distance);
    theta_ok.push_back(r.theta_in_ball ? 1.0 : 0.0);
  }

  json params = json::array();
  params.push_back({{"name", "eta"},
                    {"value", results[0].eta},
                    {"formula", "sqrt(log(|Pi|)/(K*H^2*d)) [directional hedge rate]"}});
  params.push_back({{"name", "alpha_t"},
                    {"value", 2.0 / (inst.mdp.VMax() * std::sqrt(double(inst.reward_dim)))},
                    {"formula", "2/(H*sqrt(d*t)) [dual gradient step, value at t=1]"}});
  ParamReport b = BetaReport("beta", results[0].beta, cfg.c, inst.mdp.VMax(),
                             classes.MaxUnionSize(), cfg.episodes, inst.mdp.horizon,
                             static_cast<double>(pi.size()) * inst.reward_dim, cfg.delta,
                             "vector schedule");
  params.push_back({{"name", b.name}, {"value", b.value}, {"formula", b.formula}});
  out.summary["params"] = params;
  out.summary["per_episode"]["distance_to_date"] = QuantileSeries(distance_series);
  out.summary["final"]["distance"] = FinalStat(final_distance);
  out.summary["final"]["excess_distance"] = FinalStat(excess_distance);
  out.summary["final"]["theta_in_ball"] = FinalStat(theta_ok);
  return out;
}

}  // namespace

RunArtifacts RunExperiment(const ExperimentConfig& cfg) {
  ModeOutput out;
  if (cfg.mode == "decentralized")
    out = RunDecentralizedMode(cfg);
  else if (cfg.mode == "selfplay")
    out = RunSelfplayMode(cfg);
  else if (cfg.mode == "cmdp")
    out = RunCmdpMode(cfg);
  else if (cfg.mode == "vmdp")
    out = RunVmdpMode(cfg);
  else
    throw ConfigError("unknown mode: " + cfg.mode);

  std::filesystem::create_directories(cfg.out_dir);
  RunArtifacts artifacts;
  json seeds = json::array();
  for (int i = 0; i < cfg.seed_count; ++i) {
    const uint64_t master = cfg.seed + static_cast<uint64_t>(i);
    seeds.push_back(master);
    std::string path =
        (std::filesystem::path(cfg.out_dir) / ("seed_" + std::to_string(master) + ".csv"))
            .string();
    WriteFile(path, out.csv_texts[i]);
    artifacts.csv_paths.push_back(path);
  }
  out.summary["schema_version"] = 1;
  out.summary["mode"] = cfg.mode;
  out.summary["episodes"] = cfg.episodes;
  out.summary["seeds"] = seeds;
  artifacts.summary_path = (std::filesystem::path(cfg.out_dir) / "summary.json").string();
  WriteFile(artifacts.summary_path, out.summary.dump(2) + "\n");
  return artifacts;
}

std::string GenerateInstanceJson(const ExperimentConfig& cfg) {
  const json doc = json::parse(cfg.raw);
  if (cfg.mode == "cmdp") return CmdpToJson(BuildCmdp(doc, cfg.config_dir));
  if (cfg.mode == "vmdp") return VmdpToJson(BuildVmdp(doc, cfg.config_dir));
  return GameToJson(BuildGame(GetSpec(doc, "game"), cfg.config_dir, -1));
}

CheckReport CheckExperiment(const ExperimentConfig& cfg) {
  CheckReport report;
  auto fail = [&report](const std::string& message) {
    report.ok = false;
    report.failures.push_back(message);
  };
  const json doc = json::parse(cfg.raw);

  try {
    if (cfg.mode == "decentralized" || cfg.mode == "selfplay") {
      TabularMarkovGame game = BuildGame(GetSpec(doc, "game"), cfg.config_dir, -1);
      ValidationReport v = Validate(game);
      if (!v.ok()) fail("game validation:\n" + v.ToString());

      if (cfg.mode == "decentralized") {
        PolicyClass pi = BuildPolicyClass(GetSpec(doc, "policy_class"), game.horizon,
                                          game.n_states, game.PlayerActions());
        PolicyClass pi_prime = BuildPolicyClass(GetSpec(doc, "opponent_class"), game.horizon,
                                                game.n_states, game.OpponentActions());
        OpponentModel opponent = BuildOpponent(doc);
        BuiltClasses classes = BuildOrLoadClasses(doc, cfg.config_dir, game, pi, pi_prime, 0);
        for (const auto& f :
             CheckRealizability(game, pi, pi_prime, game.RewardTable(0), classes))
          fail(f.ToString());
        for (const auto& f :
             CheckCompleteness(game, pi, pi_prime, game.RewardTable(0), classes))
          fail(f.ToString());
        for (const auto& f : CheckRange(classes, game.VMax())) fail(f.ToString());
        const double multiplicity =
            static_cast<double>(pi.size()) * (opponent.IsAdaptive() ? pi_prime.size() : 1);
        const double eta = cfg.eta >= 0.0 ? cfg.eta
                                          : DefaultEta(pi.size(), cfg.episodes, game.VMax());
        const double beta =
            cfg.beta >= 0.0 ? cfg.beta
                            : SlackBeta(cfg.c, game.VMax(), classes.UnionSize(), cfg.episodes,
                                        game.horizon, multiplicity, cfg.delta);
        report.params.push_back(EtaReport(eta, pi.size(), cfg.episodes, game.VMax()));
        report.params.push_back(BetaReport(
            "beta", beta, cfg.c, game.VMax(), classes.UnionSize(), cfg.episodes, game.horizon,
            multiplicity, cfg.delta,
            opponent.IsAdaptive() ? "adaptive-opponent schedule" : "oblivious-opponent schedule"));
      } else {
        const int n = game.NumAgents();
        std::vector<PolicyClass> agent_classes;
        for (int i = 0; i < n; ++i) {
          const json spec = doc.contains("agent_policy_classes")
                                ? doc.at("agent_policy_classes").at(i)
                                : GetSpec(doc, "policy_class");
          agent_classes.push_back(
              BuildPolicyClass(spec, game.horizon, game.n_states, game.agent_action_counts[i]));
        }
        ClassBuildSpec class_spec = BuildClassSpec(doc);
        for (int i = 0; i < n; ++i) {
          TabularMarkovGame view = ViewForAgent(game, i);
          PolicyClass meta = MetaOpponentClass(agent_classes, i);
          BuiltClasses classes = BuildRealizableClasses(view, agent_classes[i], meta,
                                                        view.RewardTable(0), class_spec);
          for (const auto& f :
               CheckRealizability(view, agent_classes[i], meta, view.RewardTable(0), classes))
            fail("agent " + std::to_string(i) + ": " + f.ToString());
          for (const auto& f :
               CheckCompleteness(view, agent_classes[i], meta, view.RewardTable(0), classes))
            fail("agent " + std::to_string(i) + ": " + f.ToString());
          const double eta = cfg.eta >= 0.0
                                 ? cfg.eta
                                 : DefaultEta(agent_classes[i].size(), cfg.episodes, game.VMax());
          ParamReport eta_rep = EtaReport(eta, agent_classes[i].size(), cfg.episodes, game.VMax());
          eta_rep.name = "eta_" + std::to_string(i);
          report.params.push_back(eta_rep);
          int meta_count = meta.size();
          const double beta =
              cfg.beta >= 0.0
                  ? cfg.beta
                  : SlackBeta(cfg.c, game.VMax(), classes.UnionSize(), cfg.episodes,
                              game.horizon,
                              static_cast<double>(agent_classes[i].size()) * meta_count * n,
                              cfg.delta);
          report.params.push_back(BetaReport(
              "beta_" + std::to_string(i), beta, cfg.c, game.VMax(), classes.UnionSize(),
              cfg.episodes, game.horizon,
              static_cast<double>(agent_classes[i].size()) * meta_count * n, cfg.delta,
              "self-play schedule"));
        }
      }
    } else if (cfg.mode == "cmdp") {
      CmdpInstance inst = BuildCmdp(doc, cfg.config_dir);
      PolicyClass pi = BuildPolicyClass(GetSpec(doc, "policy_class"), inst.mdp.horizon,
                                        inst.mdp.n_states, inst.mdp.PlayerActions());
      ClassBuildSpec class_spec = BuildClassSpec(doc);
      BuiltClasses rc =
          BuildRealizableClassesSingle(inst.mdp, pi, inst.mdp.RewardTable(0), class_spec);
      ClassBuildSpec us = class_spec;
      us.seed = class_spec.seed + 1;
      BuiltClasses uc = BuildRealizableClassesSingle(inst.mdp, pi, inst.mdp.RewardTable(1), us);
      PolicyClass trivial;
      trivial.policies.push_back(
          TabularPolicy::Uniform(inst.mdp.horizon, inst.mdp.n_states, 1));
      for (const auto& f : CheckRealizability(inst.mdp, pi, trivial, inst.mdp.RewardTable(0), rc))
        fail("reward classes: " + f.ToString());
      for (const auto& f : CheckCompleteness(inst.mdp, pi, trivial, inst.mdp.RewardTable(0), rc))
        fail("reward classes: " + f.ToString());
      for (const auto& f : CheckRealizability(inst.mdp, pi, trivial, inst.mdp.RewardTable(1), uc))
        fail("utility classes: " + f.ToString());
      for (const auto& f : CheckCompleteness(inst.mdp, pi, trivial, inst.mdp.RewardTable(1), uc))
        fail("utility classes: " + f.ToString());

      if (inst.slater_slack && inst.slater_witness) {
        const double v_g =
            PolicyValue(inst.mdp, pi[*inst.slater_witness], inst.mdp.RewardTable(1));
        if (v_g + 1e-9 < inst.threshold + *inst.slater_slack)
          fail("Slater witness violates the declared slack: V_g = " + FormatDouble(v_g));
      }
      double chi;
      if (cfg.chi >= 0.0) {
        chi = cfg.chi;
      } else if (inst.slater_slack) {
        chi = DualBound(inst.mdp.VMax(), *inst.slater_slack);
      } else {
        fail("MissingSlaterSlack: chi requested by formula but no slack provided");
        chi = 0.0;
      }
      CmdpOptimum opt = ConstrainedOptimum(inst, pi);
      if (!opt.feasible_exists) fail("no member of the policy class is feasible");
      const double h = inst.mdp.VMax();
      const double eta =
          cfg.eta >= 0.0 ? cfg.eta
                         : std::sqrt(std::log(double(std::max(pi.size(), 2))) /
                                     (cfg.episodes * (chi + 1.0) * (chi + 1.0) * h * h));
      report.params.push_back(
          {"eta", eta, "sqrt(log(|Pi|)/(K*(chi+1)^2*H^2)) [lagrangian hedge rate]"});
      report.params.push_back({"alpha",
                               cfg.alpha >= 0.0 ? cfg.alpha : 1.0 / std::sqrt(cfg.episodes),
                               "1/sqrt(K) [dual gradient step]"});
      report.params.push_back({"chi", chi, "2H/slater_slack [dual cap]"});
      report.params.push_back(BetaReport(
          "beta_reward",
          cfg.beta >= 0.0 ? cfg.beta
                          : SlackBeta(cfg.c, h, rc.UnionSize(), cfg.episodes, inst.mdp.horizon,
                                      pi.size(), cfg.delta),
          cfg.c, h, rc.UnionSize(), cfg.episodes, inst.mdp.horizon, pi.size(), cfg.delta,
          "single-agent schedule"));
      report.params.push_back(BetaReport(
          "beta_utility",
          cfg.beta >= 0.0 ? cfg.beta
                          : SlackBeta(cfg.c, h, uc.UnionSize(), cfg.episodes, inst.mdp.horizon,
                                      pi.size(), cfg.delta),
          cfg.c, h, uc.UnionSize(), cfg.episodes, inst.mdp.horizon, pi.size(), cfg.delta,
          "single-agent schedule"));
    } else if (cfg.mode == "vmdp") {
      VmdpInstance inst = BuildVmdp(doc, cfg.config_dir);
      PolicyClass pi = BuildPolicyClass(GetSpec(doc, "policy_class"), inst.mdp.horizon,
                                        inst.mdp.n_states, inst.mdp.PlayerActions());
      VectorBuiltClasses classes = BuildVectorClasses(inst, pi, BuildClassSpec(doc));
      for (const auto& f : CheckVectorRealizability(inst, pi, classes)) fail(f.ToString());
      for (const auto& f : CheckVectorCompleteness(inst, pi, classes)) fail(f.ToString());
      const double h = inst.mdp.VMax();
      const double eta = cfg.eta >= 0.0
                             ? cfg.eta
                             : std::sqrt(std::log(double(std::max(pi.size(), 2))) /
                                         (cfg.episodes * h * h * inst.reward_dim));
      report.params.push_back(
          {"eta", eta, "sqrt(log(|Pi|)/(K*H^2*d)) [directional hedge rate]"});
      report.params.push_back({"alpha_1", 2.0 / (h * std::sqrt(double(inst.reward_dim))),
                               "2/(H*sqrt(d*t)) [dual gradient step at t=1]"});
      report.params.push_back(BetaReport(
          "beta",
          cfg.beta >= 0.0
              ? cfg.beta
              : SlackBeta(cfg.c, h, classes.MaxUnionSize(), cfg.episodes, inst.mdp.horizon,
                          static_cast<double>(pi.size()) * inst.reward_dim, cfg.delta),
          cfg.c, h, classes.MaxUnionSize(), cfg.episodes, inst.mdp.horizon,
          static_cast<double>(pi.size()) * inst.reward_dim, cfg.delta, "vector schedule"));
    } else {
      fail("unknown mode: " + cfg.mode);
    }
  } catch (const std::exception& e) {
    fail(std::string("check aborted: ") + e.what());
  }

  std::ostringstream text;
  text << (report.ok ? "CHECK PASSED" : "CHECK FAILED") << "\n";
  for (const std::string& f : report.failures) text << "  fail: " << f << "\n";
  for (const ParamReport& p : report.params)
    text << "  param " << p.name << " = " << FormatDouble(p.value) << "  (" << p.formula << ")\n";
  report.text = text.str();

  json j;
  j["ok"] = report.ok;
  j["failures"] = report.failures;
  json params = json::array();
  for (const ParamReport& p : report.params)
    params.push_back({{"name", p.name}, {"value", p.value}, {"formula", p.formula}});
  j["params"] = params;
  j["text"] = report.text;
  report.json = j.dump(2) + "\n";
  return report;
}

}  // namespace doris
