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

#include "doris/game.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace doris {

namespace {
constexpr double kRowTolerance = 1e-12;
}

int TabularMarkovGame::NumJointActions() const {
  int n = 1;
  for (int a : agent_action_counts) n *= a;
  return n;
}

int TabularMarkovGame::OpponentActions() const {
  int n = 1;
  for (size_t i = 1; i < agent_action_counts.size(); ++i) n *= agent_action_counts[i];
  return n;
}

std::string ValidationReport::ToString() const {
  if (ok()) return "ok";
  std::ostringstream out;
  for (const auto& issue : issues)
    out << issue.code << " at " << issue.where << " (value " << issue.value << ")\n";
  return out.str();
}

ValidationReport Validate(const TabularMarkovGame& game) {
  ValidationReport report;
  auto bad_index = [&](const std::string& where, double value) {
    report.issues.push_back({"IndexOutOfRange", where, value});
  };
  if (game.n_states < 1) bad_index("n_states", game.n_states);
  if (game.horizon < 1) bad_index("horizon", game.horizon);
  if (game.agent_action_counts.empty()) bad_index("agent_action_counts", 0);
  for (size_t i = 0; i < game.agent_action_counts.size(); ++i)
    if (game.agent_action_counts[i] < 1)
      bad_index("agent_action_counts[" + std::to_string(i) + "]", game.agent_action_counts[i]);
  if (!report.ok()) return report;

  if (game.start_state < 0 || game.start_state >= game.n_states)
    bad_index("start_state", game.start_state);

  const int joint = game.NumJointActions();
  const size_t p_size = static_cast<size_t>(game.horizon) * game.n_states * joint * game.n_states;
  if (game.transitions.size() != p_size) {
    bad_index("transitions.size", static_cast<double>(game.transitions.size()));
    return report;
  }
  const size_t r_size = static_cast<size_t>(game.horizon) * game.n_states * joint;
  for (size_t c = 0; c < game.rewards.size(); ++c)
    if (game.rewards[c].size() != r_size) {
      bad_index("rewards[" + std::to_string(c) + "].size",
                static_cast<double>(game.rewards[c].size()));
      return report;
    }

  for (int h = 0; h < game.horizon; ++h) {
    for (int s = 0; s < game.n_states; ++s) {
      for (int j = 0; j < joint; ++j) {
        auto row = game.NextStateDist(h, s, j);
        double sum = 0.0;
        bool negative = false;
        for (double v : row) {
          if (v < 0.0 || !std::isfinite(v)) negative = true;
          sum += v;
        }
        if (negative || std::abs(sum - 1.0) > kRowTolerance) {
          std::ostringstream where;
          where << "P[h=" << h << "][s=" << s << "][joint=" << j << "]";
          report.issues.push_back({"RowNotStochastic", where.str(), sum});
        }
        for (size_t c = 0; c < game.rewards.size(); ++c) {
          double r = game.Reward(static_cast<int>(c), h, s, j);
          if (!(r >= 0.0 && r <= 1.0)) {
            std::ostringstream where;
            where << "r[channel=" << c << "][h=" << h << "][s=" << s << "][joint=" << j << "]";
            report.issues.push_back({"RewardOutOfRange", where.str(), r});
          }
        }
      }
    }
  }
  return report;
}

void ValidateOrThrow(const TabularMarkovGame& game) {
  ValidationReport report = Validate(game);
  if (!report.ok()) throw DorisError("invalid game:\n" + report.ToString());
}

TabularMarkovGame ViewForAgent(const TabularMarkovGame& game, int agent) {
  const int n = game.NumAgents();
  if (agent < 0 || agent >= n) throw ShapeMismatchError("ViewForAgent: agent out of range");
  if (agent == 0) return game;

  // Agent order of the view: [agent, 0, 1, ..., skipping agent].
  std::vector<int> order;
  order.push_back(agent);
  for (int i = 0; i < n; ++i)
    if (i != agent) order.push_back(i);

  TabularMarkovGame view;
  view.n_states = game.n_states;
  view.horizon = game.horizon;
  view.start_state = game.start_state;
  view.agent_action_counts.resize(n);
  for (int i = 0; i < n; ++i) view.agent_action_counts[i] = game.agent_action_counts[order[i]];

  const int joint = game.NumJointActions();
  // strides of the original row-major joint index
  std::vector<int> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * game.agent_action_counts[i + 1];

  // Map each original joint index to the permuted joint index.
  std::vector<int> remap(joint);
  for (int j = 0; j < joint; ++j) {
    int out = 0;
    for (int i = 0; i < n; ++i) {
      int orig_agent = order[i];
      int a = (j / stride[orig_agent]) % game.agent_action_counts[orig_agent];
      out = out * game.agent_action_counts[orig_agent] + a;
    }
    remap[j] = out;
  }

  view.transitions.resize(game.transitions.size());
  const bool per_agent_channels = game.NumChannels() == n;
  view.rewards.resize(game.rewards.size());
  for (auto& ch : view.rewards) ch.resize(game.rewards[0].size());
  for (int h = 0; h < game.horizon; ++h) {
    for (int s = 0; s < game.n_states; ++s) {
      for (int j = 0; j < joint; ++j) {
        size_t src = (static_cast<size_t>(h) * game.n_states + s) * joint + j;
        size_t dst = (static_cast<size_t>(h) * game.n_states + s) * joint + remap[j];
        std::copy(game.transitions.begin() + src * game.n_states,
                  game.transitions.begin() + (src + 1) * game.n_states,
                  view.transitions.begin() + dst * game.n_states);
        for (int c = 0; c < game.NumChannels(); ++c) {
          int out_channel = per_agent_channels ? static_cast<int>(
                                std::find(order.begin(), order.end(), c) - order.begin())
                                               : c;
          view.rewards[out_channel][dst] = game.rewards[c][src];
        }
      }
    }
  }
  return view;
}

Episode SampleEpisode(const TabularMarkovGame& game, std::span<const TabularPolicy> agents,
                      Rng& rng) {
  if (static_cast<int>(agents.size()) != game.NumAgents())
    throw ShapeMismatchError("SampleEpisode: one policy per agent required");
  Episode ep;
  ep.steps.reserve(game.horizon);
  int s = game.start_state;
  for (int h = 0; h < game.horizon; ++h) {
    int joint = 0;
    int player_action = 0;
    int opponent_action = 0;
    for (size_t i = 0; i < agents.size(); ++i) {
      int a = rng.NextCategorical(agents[i].Row(h, s));
      if (i == 0)
        player_action = a;
      else
        opponent_action = opponent_action * agents[i].n_actions + a;
      joint = joint * agents[i].n_actions + a;
    }
    EpisodeStep step;
    step.state = s;
    step.action = player_action;
    step.opponent_action = opponent_action;
    step.rewards.resize(game.NumChannels());
    for (int c = 0; c < game.NumChannels(); ++c) step.rewards[c] = game.Reward(c, h, s, joint);
    int next = rng.NextCategorical(game.NextStateDist(h, s, joint));
    ep.steps.push_back(std::move(step));
    s = next;
  }
  ep.final_state = s;
  return ep;
}

Episode SampleEpisode(const TabularMarkovGame& game, const TabularPolicy& mu,
                      const TabularPolicy& nu, Rng& rng) {
  if (game.NumAgents() == 2) {
    TabularPolicy pols[2] = {mu, nu};
    return SampleEpisode(game, pols, rng);
  }
  if (game.NumAgents() == 1) {
    if (nu.n_actions != 1) throw ShapeMismatchError("SampleEpisode: single-agent game");
    TabularPolicy pols[1] = {mu};
    return SampleEpisode(game, pols, rng);
  }
  throw ShapeMismatchError("SampleEpisode: pass per-agent policies for n-agent games");
}

Episode EpisodeViewForAgent(const Episode& episode, std::span<const int> agent_action_counts,
                            int agent) {
  const int n = static_cast<int>(agent_action_counts.size());
  if (agent < 0 || agent >= n)
    throw ShapeMismatchError("EpisodeViewForAgent: agent out of range");
  if (agent == 0) return episode;

  std::vector<int> order;
  order.push_back(agent);
  for (int i = 0; i < n; ++i)
    if (i != agent) order.push_back(i);

  Episode out;
  out.final_state = episode.final_state;
  out.steps.reserve(episode.steps.size());
  for (const EpisodeStep& step : episode.steps) {
    // Decode the per-agent actions from the agent-0 encoding.
    int opp_space = 1;
    for (int i = 1; i < n; ++i) opp_space *= agent_action_counts[i];
    int joint = step.action * opp_space + step.opponent_action;
    std::vector<int> actions(n);
    for (int i = n - 1; i >= 0; --i) {
      actions[i] = joint % agent_action_counts[i];
      joint /= agent_action_counts[i];
    }
    EpisodeStep view;
    view.state = step.state;
    view.action = actions[agent];
    view.opponent_action = 0;
    for (int i = 0; i < n; ++i) {
      if (i == agent) continue;
      view.opponent_action = view.opponent_action * agent_action_counts[i] + actions[i];
    }
    const bool per_agent_channels = static_cast<int>(step.rewards.size()) == n;
    view.rewards.resize(step.rewards.size());
    for (size_t c = 0; c < step.rewards.size(); ++c) {
      size_t out_channel = per_agent_channels
                               ? static_cast<size_t>(std::find(order.begin(), order.end(),
                                                               static_cast<int>(c)) -
                                                     order.begin())
                               : c;
      view.rewards[out_channel] = step.rewards[c];
    }
    out.steps.push_back(std::move(view));
  }
  return out;
}

TabularMarkovGame GenRandomGame(const RandomGameSpec& spec) {
  TabularMarkovGame game;
  game.n_states = spec.n_states;
  game.horizon = spec.horizon;
  game.start_state = 0;
  game.agent_action_counts = spec.agent_action_counts;
  const int joint = game.NumJointActions();
  const int channels = spec.reward_channels < 0 ? game.NumAgents() : spec.reward_channels;

  Rng rng = MakeStream(spec.seed, "game-generator");
  game.transitions.resize(static_cast<size_t>(game.horizon) * game.n_states * joint *
                          game.n_states);
  for (int h = 0; h < game.horizon; ++h)
    for (int s = 0; s < game.n_states; ++s)
      for (int j = 0; j < joint; ++j) {
        size_t base =
            ((static_cast<size_t>(h) * game.n_states + s) * joint + j) * game.n_states;
        double sum = 0.0;
        for (int s2 = 0; s2 < game.n_states; ++s2) {
          double e = rng.NextExponential();
          game.transitions[base + s2] = e;
          sum += e;
        }
        // Renormalize once at generation time; rows are never touched later.
        for (int s2 = 0; s2 < game.n_states; ++s2) game.transitions[base + s2] /= sum;
        // Force the row to sum to exactly 1 within tolerance by assigning the
        // residual to the largest entry.
        double total = std::accumulate(game.transitions.begin() + base,
                                       game.transitions.begin() + base + game.n_states, 0.0);
        size_t arg = base;
        for (int s2 = 1; s2 < game.n_states; ++s2)
          if (game.transitions[base + s2] > game.transitions[arg]) arg = base + s2;
        game.transitions[arg] += 1.0 - total;
      }

  game.rewards.resize(channels);
  for (int c = 0; c < channels; ++c) {
    game.rewards[c].resize(static_cast<size_t>(game.horizon) * game.n_states * joint);
    for (auto& r : game.rewards[c]) r = rng.NextDouble();
  }
  return game;
}

TabularMarkovGame MakeMatchingPennies() {
  TabularMarkovGame game;
  game.n_states = 1;
  game.horizon = 1;
  game.start_state = 0;
  game.agent_action_counts = {2, 2};
  game.transitions = {1.0, 1.0, 1.0, 1.0};  // single state, all joints
  game.rewards.resize(2);
  // joints row-major: (0,0) (0,1) (1,0) (1,1)
  game.rewards[0] = {1.0, 0.0, 0.0, 1.0};
  game.rewards[1] = {0.0, 1.0, 1.0, 0.0};
  return game;
}

TabularMarkovGame EmbedLinearGame(const LinearGameFeatures& f) {
  TabularMarkovGame game;
  game.n_states = f.n_states;
  game.horizon = f.horizon;
  game.start_state = f.start_state;
  game.agent_action_counts = f.agent_action_counts;
  const int joint = game.NumJointActions();

  auto phi_at = [&](int h, int s, int j) {
    size_t base = ((static_cast<size_t>(h) * f.n_states + s) * joint + j) * f.dim;
    return std::span<const double>(f.phi.data() + base, static_cast<size_t>(f.dim));
  };
  auto psi_at = [&](int h, int k) {
    size_t base = (static_cast<size_t>(h) * f.dim + k) * f.n_states;
    return std::span<const double>(f.psi.data() + base, static_cast<size_t>(f.n_states));
  };

  game.transitions.resize(static_cast<size_t>(game.horizon) * game.n_states * joint *
                          game.n_states);
  for (int h = 0; h < game.horizon; ++h)
    for (int s = 0; s < game.n_states; ++s)
      for (int j = 0; j < joint; ++j) {
        auto phi = phi_at(h, s, j);
        size_t base =
            ((static_cast<size_t>(h) * game.n_states + s) * joint + j) * game.n_states;
        for (int s2 = 0; s2 < game.n_states; ++s2) {
          double v = 0.0;
          for (int k = 0; k < f.dim; ++k) v += phi[k] * psi_at(h, k)[s2];
          game.transitions[base + s2] = v;
        }
      }

  game.rewards.resize(f.theta.size());
  for (size_t c = 0; c < f.theta.size(); ++c) {
    game.rewards[c].resize(static_cast<size_t>(game.horizon) * game.n_states * joint);
    for (int h = 0; h < game.horizon; ++h)
      for (int s = 0; s < game.n_states; ++s)
        for (int j = 0; j < joint; ++j) {
          auto phi = phi_at(h, s, j);
          double v = 0.0;
          for (int k = 0; k < f.dim; ++k) v += phi[k] * f.theta[c][static_cast<size_t>(h) * f.dim + k];
          game.rewards[c][(static_cast<size_t>(h) * game.n_states + s) * joint + j] = v;
        }
  }

  ValidationReport report = Validate(game);
  if (!report.ok())
    throw NotAStochasticEmbeddingError("linear features induce an invalid game:\n" +
                                       report.ToString());
  return game;
}

ValidationReport ValidateCmdp(const CmdpInstance& inst) {
  ValidationReport report = Validate(inst.mdp);
  if (inst.mdp.NumAgents() != 1)
    report.issues.push_back({"IndexOutOfRange", "cmdp.agents", inst.mdp.NumAgents()});
  if (inst.mdp.NumChannels() != 2)
    report.issues.push_back({"IndexOutOfRange", "cmdp.channels", inst.mdp.NumChannels()});
  if (!(inst.threshold > 0.0 && inst.threshold <= inst.mdp.VMax()))
    report.issues.push_back({"IndexOutOfRange", "cmdp.threshold", inst.threshold});
  if (inst.slater_slack && !(*inst.slater_slack > 0.0))
    report.issues.push_back({"IndexOutOfRange", "cmdp.slater_slack", *inst.slater_slack});
  return report;
}

ValidationReport ValidateVmdp(const VmdpInstance& inst) {
  ValidationReport report = Validate(inst.mdp);
  if (inst.mdp.NumAgents() != 1)
    report.issues.push_back({"IndexOutOfRange", "vmdp.agents", inst.mdp.NumAgents()});
  if (inst.reward_dim < 1 || inst.mdp.NumChannels() != inst.reward_dim)
    report.issues.push_back({"IndexOutOfRange", "vmdp.reward_dim", inst.reward_dim});
  if (inst.target.vertices.empty())
    report.issues.push_back({"IndexOutOfRange", "vmdp.target.vertices", 0});
  for (size_t i = 0; i < inst.target.vertices.size(); ++i) {
    if (static_cast<int>(inst.target.vertices[i].size()) != inst.reward_dim)
      report.issues.push_back(
          {"IndexOutOfRange", "vmdp.target.vertices[" + std::to_string(i) + "]",
           static_cast<double>(inst.target.vertices[i].size())});
    for (double v : inst.target.vertices[i])
      if (!std::isfinite(v))
        report.issues.push_back(
            {"RewardOutOfRange", "vmdp.target.vertices[" + std::to_string(i) + "]", v});
  }
  return report;
}

// --- JSON -----------------------------------------------------------------

namespace {

using nlohmann::json;

json GameToJsonObject(const TabularMarkovGame& game) {
  json doc;
  doc["schema_version"] = 1;
  doc["n_states"] = game.n_states;
  doc["horizon"] = game.horizon;
  doc["start_state"] = game.start_state;
  doc["agent_action_counts"] = game.agent_action_counts;
  doc["transitions"] = game.transitions;
  doc["rewards"] = game.rewards;
  return doc;
}

TabularMarkovGame GameFromJsonObject(const json& doc) {
  if (!doc.contains("schema_version") || doc["schema_version"].get<int>() != 1)
    throw ConfigError("game json: unsupported schema_version");
  TabularMarkovGame game;
  game.n_states = doc.at("n_states").get<int>();
  game.horizon = doc.at("horizon").get<int>();
  game.start_state = doc.at("start_state").get<int>();
  game.agent_action_counts = doc.at("agent_action_counts").get<std::vector<int>>();
  game.transitions = doc.at("transitions").get<std::vector<double>>();
  game.rewards = doc.at("rewards").get<std::vector<std::vector<double>>>();
  ValidateOrThrow(game);
  return game;
}

}  // namespace

std::string GameToJson(const TabularMarkovGame& game) {
  return GameToJsonObject(game).dump(2) + "\n";
}

TabularMarkovGame GameFromJson(const std::string& text) {
  return GameFromJsonObject(json::parse(text));
}

std::string CmdpToJson(const CmdpInstance& inst) {
  json doc = GameToJsonObject(inst.mdp);
  doc["kind"] = "cmdp";
  doc["threshold"] = inst.threshold;
  if (inst.slater_slack) doc["slater_slack"] = *inst.slater_slack;
  if (inst.slater_witness) doc["slater_witness"] = *inst.slater_witness;
  return doc.dump(2) + "\n";
}

CmdpInstance CmdpFromJson(const std::string& text) {
  json doc = json::parse(text);
  CmdpInstance inst;
  inst.mdp = GameFromJsonObject(doc);
  inst.threshold = doc.at("threshold").get<double>();
  if (doc.contains("slater_slack")) inst.slater_slack = doc["slater_slack"].get<double>();
  if (doc.contains("slater_witness")) inst.slater_witness = doc["slater_witness"].get<int>();
  return inst;
}

std::string VmdpToJson(const VmdpInstance& inst) {
  json doc = GameToJsonObject(inst.mdp);
  doc["kind"] = "vmdp";
  doc["reward_dim"] = inst.reward_dim;
  doc["target_vertices"] = inst.target.vertices;
  return doc.dump(2) + "\n";
}

VmdpInstance VmdpFromJson(const std::string& text) {
  json doc = json::parse(text);
  VmdpInstance inst;
  inst.mdp = GameFromJsonObject(doc);
  inst.reward_dim = doc.at("reward_dim").get<int>();
  inst.target.vertices = doc.at("target_vertices").get<std::vector<std::vector<double>>>();
  return inst;
}

}  // namespace doris
