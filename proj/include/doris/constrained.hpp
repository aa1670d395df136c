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

#ifndef DORIS_CONSTRAINED_HPP_
#define DORIS_CONSTRAINED_HPP_

#include <vector>

#include "doris/agents.hpp"
#include "doris/game.hpp"

// Primal-dual loop for constrained MDPs: the Lagrangian turns the constraint
// into a fictitious zero-sum opponent whose action is the scalar dual
// variable, so the Hedge player optimizes reward-plus-weighted-utility
// estimates while projected gradient descent tracks the violation.

namespace doris {

struct CmdpConfig : DorisConfig {
  double alpha = -1.0;  // dual step; negative derives 1/sqrt(K)
  double chi = -1.0;    // dual projection cap; negative derives 2H/slack
};

// Dual cap 2H/slack, floored at 1e-6 as the slack grows unbounded. Throws
// MissingSlaterSlackError when the slack is not positive.
double DualBound(double horizon, double slater_slack);

// Exact enumeration of the best feasible member of Pi.
struct CmdpOptimum {
  bool feasible_exists = false;
  int best_id = -1;
  double reward_value = 0.0;
  double utility_value = 0.0;
};
CmdpOptimum ConstrainedOptimum(const CmdpInstance& inst, const PolicyClass& pi);

struct CmdpRecord {
  int t = 0;
  int mu_id = 0;
  std::vector<double> vbar_reward;
  std::vector<double> vbar_utility;
  double dual = 0.0;       // Y_t used in this episode's Hedge step
  double shortfall = 0.0;  // b minus the played policy's exact utility value
  double true_reward = 0.0;
  double regret_to_date = 0.0;      // against the best feasible member of Pi
  double violation_to_date = 0.0;
  double optimism_frac_reward = 0.0;
  double optimism_frac_utility = 0.0;
};

struct CmdpResult {
  std::vector<CmdpRecord> records;
  double final_regret = 0.0;
  double final_violation = 0.0;
  double eta = 0.0;
  double beta_reward = 0.0;
  double beta_utility = 0.0;
  double alpha = 0.0;
  double chi = 0.0;
  // Online-gradient telescoping: max over Y in {0, chi} (the maximum of a
  // linear function over the cap interval) of
  //   sum_t (b - vbar_g(mu^t)) (Y - Y_t),
  // which the dual update keeps below (H^2 + chi^2) sqrt(K) / 2.
  double telescoping_lhs = 0.0;
  double telescoping_rhs = 0.0;
  bool dual_in_range = true;  // Y_t stayed inside [0, chi] after every update
  std::vector<int> mu_sequence;
};

// Per episode: sample mu^t, roll one trajectory (reward and utility are two
// views of the same stream), optimistically evaluate both channels for every
// policy, Hedge on vbar_r + Y_t vbar_g, then project the dual step. Regret
// and violation are computed from exact values only.
CmdpResult RunConstrained(const CmdpInstance& inst, const PolicyClass& pi,
                          const BuiltClasses& reward_classes,
                          const BuiltClasses& utility_classes, const CmdpConfig& cfg);

}  // namespace doris

#endif  // DORIS_CONSTRAINED_HPP_
