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

#ifndef DORIS_DP_HPP_
#define DORIS_DP_HPP_

#include <array>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "doris/game.hpp"
#include "doris/policy.hpp"

// Exact backward-induction oracles. Every ground-truth quantity (values,
// occupancies, hindsight baselines, regret, violation, equilibrium gaps)
// comes from here, never from Monte Carlo, so identity tests carry
// float-level tolerances. The learning loops must not call these except for
// metrics.

namespace doris {

// Exact Q/V tables for one (joint policy, reward table) pair.
// q is row-major [h][s][a][b], v is [h][s]; indices follow the 2-view
// (a = player action, b = meta-opponent action).
struct ValueTables {
  int horizon = 0;
  int n_states = 0;
  int n_player_actions = 0;
  int n_opponent_actions = 0;
  std::vector<double> q;
  std::vector<double> v;

  double Q(int h, int s, int a, int b) const {
    return q[((static_cast<size_t>(h) * n_states + s) * n_player_actions + a) *
                 n_opponent_actions +
             b];
  }
  double V(int h, int s) const { return v[static_cast<size_t>(h) * n_states + s]; }
  std::span<const double> StepQ(int h) const {
    size_t cells = static_cast<size_t>(n_states) * n_player_actions * n_opponent_actions;
    return {q.data() + h * cells, cells};
  }
};

// Backward induction with Q_{H+1} = 0 under the joint policy mu x nu.
// `reward` is a [h][s][joint] table (game.RewardTable(channel) or any
// external table of the same shape, e.g. a utility or one vector dimension).
ValueTables QValues(const TabularMarkovGame& game, const TabularPolicy& mu,
                    const TabularPolicy& nu, std::span<const double> reward);

// Single-agent convenience (opponent space of size 1).
ValueTables QValues(const TabularMarkovGame& game, const TabularPolicy& mu,
                    std::span<const double> reward);

double PolicyValue(const TabularMarkovGame& game, const TabularPolicy& mu,
                   const TabularPolicy& nu, std::span<const double> reward);
double PolicyValue(const TabularMarkovGame& game, const TabularPolicy& mu,
                   std::span<const double> reward);

// One application of the step-h Bellman operator to a next-step table:
// returns r_h(s,a,b) + E_{s'}[f_next(s', mu, nu)] as an [s][a][b] table.
// Pass an empty f_next for the terminal convention f_{H+1} = 0.
std::vector<double> BellmanBackup(const TabularMarkovGame& game, const TabularPolicy& mu,
                                  const TabularPolicy& nu, std::span<const double> f_next, int h,
                                  std::span<const double> reward);

// Forward state-visitation recursion d_h(s) under mu x nu; each layer sums
// to 1. The joint (h,s,a,b) occupancy is d_h(s) * mu(a|s) * nu(b|s).
std::vector<double> StateOccupancy(const TabularMarkovGame& game, const TabularPolicy& mu,
                                   const TabularPolicy& nu);
// Single-agent (h,s,a) visitation distribution.
std::vector<double> StateActionOccupancy(const TabularMarkovGame& game, const TabularPolicy& mu);

// Memo table for V_1^{mu x nu}(s_1), keyed by (player policy id, opponent
// content hash) because oblivious opponents repeat policies. Safe for
// concurrent insert-or-read.
class ValueMemo {
 public:
  double Value(const TabularMarkovGame& game, const PolicyClass& pi, int mu_id,
               const TabularPolicy& nu, std::span<const double> reward);

 private:
  struct KeyHash {
    size_t operator()(const std::pair<int, uint64_t>& k) const {
      return std::hash<uint64_t>()(k.second * 1000003ULL + static_cast<uint64_t>(k.first));
    }
  };
  std::mutex mu_;
  std::unordered_map<std::pair<int, uint64_t>, double, KeyHash> cache_;
};

struct HindsightResult {
  int best_id = 0;
  double total_value = 0.0;
};

// argmax over mu in Pi of sum_t V_1^{mu x nu^t}(s_1), exact, memoized over
// distinct opponents. Ties resolve to the lowest id.
HindsightResult HindsightBest(const TabularMarkovGame& game, const PolicyClass& pi,
                              std::span<const TabularPolicy> opponent_seq,
                              std::span<const double> reward, ValueMemo* memo = nullptr);

// Hindsight-best value minus the realized sum of values; non-negative
// whenever every played policy is a member of Pi.
double Regret(const TabularMarkovGame& game, const PolicyClass& pi, std::span<const int> mu_ids,
              std::span<const TabularPolicy> opponent_seq, std::span<const double> reward,
              ValueMemo* memo = nullptr);

// Positive part of the summed utility shortfalls sum_t (b - V_g(mu^t)).
double Violation(const CmdpInstance& inst, const PolicyClass& pi, std::span<const int> mu_ids);

// Per-agent deviation gaps of a correlated mixture: gap_i is the best fixed
// deviation value against the others' marginal minus the mixture's value for
// agent i. The mixture is an eps-coarse-correlated equilibrium iff
// max_i gap_i <= eps.
std::vector<double> CceGap(const TabularMarkovGame& game,
                           std::span<const PolicyClass> agent_classes, const MixturePolicy& mix);

// The four-way split of the per-episode regret:
//   (0) true hindsight-best value minus its optimistic estimate,
//   (1) hindsight-best estimate minus the hyperpolicy-averaged estimate,
//   (2) hyperpolicy-averaged estimate minus the sampled policy's estimate,
//   (3) sampled policy's estimate minus the realized true value.
// The terms sum to v_best_true - v_played_true exactly.
std::array<double, 4> RegretDecomposition(double v_best_true, double vbar_best,
                                          double vbar_mean, double vbar_played,
                                          double v_played_true);

}  // namespace doris

#endif  // DORIS_DP_HPP_
