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

#ifndef DORIS_AGENTS_HPP_
#define DORIS_AGENTS_HPP_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "doris/dp.hpp"
#include "doris/function_class.hpp"
#include "doris/game.hpp"
#include "doris/optlspe.hpp"
#include "doris/policy.hpp"

// The decentralized episode loop: sample a policy from the hyperpolicy, play
// an episode, receive the opponent's revealed policy, evaluate every own
// policy optimistically on the data gathered so far, and take a Hedge step.
// The learner is isolated behind HedgeValueLearner: it sees episodes and
// revealed policies only, never the transition or reward model. Drivers own
// the model for environment sampling and metrics.

namespace doris {

struct DorisConfig {
  int episodes = 100;
  double delta = 0.05;
  double c = 1.0;        // absolute constant in the slack formula
  double eta = -1.0;     // negative: derive from the schedule formula
  double beta = -1.0;    // negative: derive from the schedule formula
  uint64_t seed = 0;
  int threads = 1;
};

// eta = sqrt(log|Pi| / (K * v_max^2)).
double DefaultEta(int pi_size, int episodes, double v_max);

// beta = c * v_max^2 * log(union_size * K * H * multiplicity / delta), where
// multiplicity is |Pi| for an oblivious opponent, |Pi| * |Pi'| for an
// adaptive one, and picks up the extra per-agent / per-dimension factors of
// the self-play and vector schedules. A finite class stands in for its own
// 0-cover, so union_size replaces the covering number.
double SlackBeta(double c, double v_max, int union_size, int episodes, int horizon,
                 double multiplicity, double delta);

struct OpponentModel {
  enum class Kind {
    kSchedule,       // oblivious: explicit id sequence, repeated cyclically
    kAlternating,    // oblivious: t mod |Pi'|
    kFixed,          // fixed id every episode
    kUniformRandom,  // fresh uniform draw from Pi' each episode
    kBestResponse,   // argmin over Pi' of the player's cumulative value
  };
  Kind kind = Kind::kAlternating;
  std::vector<int> schedule;
  int fixed_id = 0;

  // Whether the slack schedule needs the |Pi'| union-bound factor: the rule
  // depends on the revealed history, so the learner must be configured for
  // the adaptive schedule (it cannot detect adaptivity at runtime).
  bool IsAdaptive() const { return kind == Kind::kBestResponse; }
};

OpponentModel ParseOpponentModel(const std::string& kind, std::vector<int> schedule,
                                 int fixed_id);

// The player-side state: hyperpolicy, episode dataset, and the finite
// classes. Local information only.
class HedgeValueLearner {
 public:
  HedgeValueLearner(PolicyClass pi, FunctionClass f_class, StepFunctionClass g_class,
                    TableShape shape, int horizon, int n_channels, int channel, int start_state,
                    double eta, double beta);

  int ChoosePolicy(Rng& rng) const { return hyperpolicy_.Sample(rng); }

  struct Evaluation {
    std::vector<double> values;                     // optimistic estimate per own policy
    std::vector<int> witnesses;                     // maximizing member per own policy
    std::vector<std::vector<double>> required_slack;  // per own policy, per class member
    std::vector<std::vector<int>> member_ids;       // confidence set per own policy
  };
  // Optimistic values of every own policy against the revealed opponent
  // policy, from the episodes absorbed so far.
  Evaluation Evaluate(const TabularPolicy& revealed_opponent, int threads = 1) const;

  void HedgeStep(std::span<const double> rewards, HedgeSign sign);
  void Absorb(const Episode& episode) { data_.Append(episode); }

  const Hyperpolicy& hyperpolicy() const { return hyperpolicy_; }
  const PolicyClass& policy_class() const { return pi_; }
  const FunctionClass& f_class() const { return f_class_; }
  const DatasetIndex& data() const { return data_; }
  double eta() const { return eta_; }
  double beta() const { return beta_; }

 private:
  PolicyClass pi_;
  FunctionClass f_class_;
  StepFunctionClass g_class_;
  int channel_;
  int start_state_;
  double eta_;
  double beta_;
  Hyperpolicy hyperpolicy_;
  DatasetIndex data_;
};

struct DecentralizedRecord {
  int t = 0;  // 1-based episode index
  int mu_id = 0;
  int nu_id = 0;
  std::vector<double> vbar;   // optimistic estimate per own policy
  double vbar_mean = 0.0;     // hyperpolicy-weighted mean of vbar
  double true_value = 0.0;    // exact value of the played joint policy
  double regret_to_date = 0.0;
  double optimism_frac = 0.0;  // fraction of own policies whose exact Q stayed in the set
  std::array<double, 4> decomposition{};  // filled after the run
};

struct DecentralizedResult {
  std::vector<DecentralizedRecord> records;
  int hindsight_id = 0;
  double final_regret = 0.0;
  double final_entropy = 0.0;
  double optimism_frequency = 0.0;  // pooled over (t, mu) pairs
  // Smallest c that would have kept every exact Q inside its set, and the
  // largest observed witness-residual-to-slack ratio. Reported, not asserted.
  double calibrated_c = 0.0;
  double witness_residual_ratio = 0.0;
  double eta = 0.0;
  double beta = 0.0;
  std::vector<int> mu_sequence;
  std::vector<int> nu_sequence;
};

DecentralizedResult RunDecentralized(const TabularMarkovGame& game, const PolicyClass& pi,
                                     const PolicyClass& pi_prime, const BuiltClasses& classes,
                                     const OpponentModel& opponent, const DorisConfig& cfg);

struct SelfplayRecord {
  int t = 0;
  std::vector<int> profile;                    // sampled policy id per agent
  std::vector<std::vector<double>> vbar;       // per agent, per own policy
  std::vector<double> true_value;              // per agent
  std::vector<double> regret_to_date;          // per agent
  std::vector<double> optimism_frac;           // per agent
};

struct SelfplayResult {
  std::vector<SelfplayRecord> records;
  MixturePolicy mixture;
  std::vector<double> cce_gaps;                // per agent, for the final mixture
  std::vector<double> etas;
  std::vector<double> betas;
};

// Every agent runs the decentralized loop against the others' revealed
// policies on one shared trajectory per episode; the output mixture is the
// uniform average of the played product profiles.
SelfplayResult RunSelfplay(const TabularMarkovGame& game,
                           std::span<const PolicyClass> agent_classes,
                           std::span<const BuiltClasses> agent_value_classes,
                           const DorisConfig& cfg);

}  // namespace doris

#endif  // DORIS_AGENTS_HPP_
