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

#ifndef DORIS_GAME_HPP_
#define DORIS_GAME_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "doris/policy.hpp"
#include "doris/rng.hpp"

namespace doris {

// A finite-horizon n-agent Markov game with a fixed start state. The joint
// tensor is stored once; the first agent is the canonical "player" and all
// remaining agents fold into a row-major meta-opponent action space (use
// ViewForAgent to re-center on another agent). A single-agent MDP is the
// degenerate case with one agent (opponent space of size 1).
//
// Rewards are a list of channels in [0, 1]: one per agent for games, and
// {reward, utility} or per-dimension vector rewards for the constrained and
// vector-valued instances. Everything is immutable after construction.
struct TabularMarkovGame {
  int n_states = 0;
  int horizon = 0;
  int start_state = 0;
  std::vector<int> agent_action_counts;
  // Row-major [h][s][joint][s']; every row is a distribution over states.
  std::vector<double> transitions;
  // Channel-major, each row-major [h][s][joint].
  std::vector<std::vector<double>> rewards;

  int NumAgents() const { return static_cast<int>(agent_action_counts.size()); }
  int NumJointActions() const;
  int PlayerActions() const { return agent_action_counts.empty() ? 0 : agent_action_counts[0]; }
  // Product of all non-player agents' action counts (1 for a single agent).
  int OpponentActions() const;
  int NumChannels() const { return static_cast<int>(rewards.size()); }
  // Rewards are constrained to [0, 1], so the value scale is exactly H.
  double VMax() const { return static_cast<double>(horizon); }

  int JointIndex(int a, int b) const { return a * OpponentActions() + b; }
  std::span<const double> NextStateDist(int h, int s, int joint) const {
    size_t base =
        ((static_cast<size_t>(h) * n_states + s) * NumJointActions() + joint) * n_states;
    return {transitions.data() + base, static_cast<size_t>(n_states)};
  }
  double Reward(int channel, int h, int s, int joint) const {
    return rewards[channel][(static_cast<size_t>(h) * n_states + s) * NumJointActions() + joint];
  }
  std::span<const double> RewardTable(int channel) const { return rewards[channel]; }
};

struct ValidationIssue {
  std::string code;   // RowNotStochastic | RewardOutOfRange | IndexOutOfRange
  std::string where;  // index path, e.g. "P[h=1][s=0][joint=3]"
  double value = 0.0;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string ToString() const;
};

// Checks every invariant: transition rows sum to 1 within 1e-12 with no
// negative entries, rewards lie in [0, 1], and indices/shapes are dense
// 0-based ranges. The report lists every violation.
ValidationReport Validate(const TabularMarkovGame& game);
void ValidateOrThrow(const TabularMarkovGame& game);

// Re-centers the game on `agent`: its actions become the player axis and the
// other agents fold into the opponent axis (row-major in original agent
// order). Reward channels are permuted the same way when there is one channel
// per agent, so channel 0 is always the new player's reward.
TabularMarkovGame ViewForAgent(const TabularMarkovGame& game, int agent);

// One played episode: the (s, a, b, rewards) tuple at every step plus the
// terminal state. `rewards` holds all observed channels.
struct EpisodeStep {
  int state = 0;
  int action = 0;
  int opponent_action = 0;
  std::vector<double> rewards;
};

struct Episode {
  std::vector<EpisodeStep> steps;
  int final_state = 0;
};

// Rolls out the joint policy (one TabularPolicy per agent) from the start
// state. Deterministic given the rng state.
Episode SampleEpisode(const TabularMarkovGame& game, std::span<const TabularPolicy> agents,
                      Rng& rng);
// Two-player convenience: player + meta-opponent policies.
Episode SampleEpisode(const TabularMarkovGame& game, const TabularPolicy& mu,
                      const TabularPolicy& nu, Rng& rng);

// Re-expresses an episode recorded in the agent-0 view in the view of
// `agent` (own action first, remaining agents folded row-major, reward
// channels permuted the same way as ViewForAgent).
Episode EpisodeViewForAgent(const Episode& episode, std::span<const int> agent_action_counts,
                            int agent);

struct RandomGameSpec {
  int n_states = 1;
  int horizon = 1;
  std::vector<int> agent_action_counts = {1};
  uint64_t seed = 0;
  int reward_channels = -1;  // default: one per agent
};

// Dirichlet(1) transition rows and uniform rewards in [0, 1]; reproducible
// from the seed and always passes Validate.
TabularMarkovGame GenRandomGame(const RandomGameSpec& spec);

// H=1, S=1 zero-sum game: agent 0 scores 1 when actions match, agent 1 gets
// the complement. Mixed uniform play is the unique equilibrium with value 0.5.
TabularMarkovGame MakeMatchingPennies();

// A linear parameterization: P_h(.|s,a,b) = phi_h(s,a,b)^T psi_h(.) and
// r_h(s,a,b) = phi_h(s,a,b)^T theta_h per channel. Materializing it yields a
// tabular game; weight-grid function classes built on top are then realizable
// by construction.
struct LinearGameFeatures {
  int dim = 0;
  int n_states = 0;
  int horizon = 0;
  std::vector<int> agent_action_counts;
  int start_state = 0;
  std::vector<double> phi;                  // [h][s][joint][dim]
  std::vector<double> psi;                  // [h][dim][s']
  std::vector<std::vector<double>> theta;   // channel -> [h][dim]
};

// Throws NotAStochasticEmbeddingError when any induced transition row or
// reward fails validation.
TabularMarkovGame EmbedLinearGame(const LinearGameFeatures& features);

// --- Constrained and vector-valued single-agent instances ---------------

// Single-agent MDP (one agent) with channel 0 = reward and channel 1 =
// utility. The optimization target is max V_r subject to V_g >= threshold.
struct CmdpInstance {
  TabularMarkovGame mdp;
  double threshold = 0.0;                  // b in (0, H]
  std::optional<double> slater_slack;      // lambda with V_g(witness) >= b + lambda
  std::optional<int> slater_witness;       // id into the experiment's policy class
};

ValidationReport ValidateCmdp(const CmdpInstance& inst);

// Vertex representation of the convex target set C.
struct TargetSet {
  std::vector<std::vector<double>> vertices;
  int dim() const { return vertices.empty() ? 0 : static_cast<int>(vertices[0].size()); }
};

// Single-agent MDP whose channels 0..d-1 are the reward vector dimensions.
struct VmdpInstance {
  TabularMarkovGame mdp;
  int reward_dim = 0;
  TargetSet target;
};

ValidationReport ValidateVmdp(const VmdpInstance& inst);

// --- JSON serialization ---------------------------------------------------
// Single documents with integer sizes, row-major nested arrays, and a
// schema_version field. Round trips are bit-exact for the decimal
// representations written.

std::string GameToJson(const TabularMarkovGame& game);
TabularMarkovGame GameFromJson(const std::string& text);
std::string CmdpToJson(const CmdpInstance& inst);
CmdpInstance CmdpFromJson(const std::string& text);
std::string VmdpToJson(const VmdpInstance& inst);
VmdpInstance VmdpFromJson(const std::string& text);

}  // namespace doris

#endif  // DORIS_GAME_HPP_
