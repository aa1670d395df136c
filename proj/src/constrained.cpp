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

#include "doris/constrained.hpp"

#include <algorithm>
#include <cmath>

namespace doris {

double DualBound(double horizon, double slater_slack) {
  if (!(slater_slack > 0.0))
    throw MissingSlaterSlackError("DualBound: positive Slater slack required");
  return std::max(2.0 * horizon / slater_slack, 1e-6);
}

CmdpOptimum ConstrainedOptimum(const CmdpInstance& inst, const PolicyClass& pi) {
  CmdpOptimum best;
  for (int id = 0; id < pi.size(); ++id) {
    const double v_r = PolicyValue(inst.mdp, pi[id], inst.mdp.RewardTable(0));
    const double v_g = PolicyValue(inst.mdp, pi[id], inst.mdp.RewardTable(1));
    if (v_g < inst.threshold) continue;
    if (!best.feasible_exists || v_r > best.reward_value) {
      best.feasible_exists = true;
      best.best_id = id;
      best.reward_value = v_r;
      best.utility_value = v_g;
    }
  }
  return best;
}

CmdpResult RunConstrained(const CmdpInstance& inst, const PolicyClass& pi,
                          const BuiltClasses& reward_classes,
                          const BuiltClasses& utility_classes, const CmdpConfig& cfg) {
  const TabularMarkovGame& mdp = inst.mdp;
  if (mdp.NumAgents() != 1 || mdp.NumChannels() != 2)
    throw ShapeMismatchError("RunConstrained: single-agent instance with two channels required");
  const double horizon = mdp.VMax();

  // Slater witness validation, when provided.
  if (inst.slater_slack && inst.slater_witness) {
    const double v_g = PolicyValue(mdp, pi[*inst.slater_witness], mdp.RewardTable(1));
    if (v_g + 1e-9 < inst.threshold + *inst.slater_slack)
      throw ConfigError("Slater witness does not satisfy the declared slack");
  }

  const double chi = cfg.chi >= 0.0
                         ? cfg.chi
                         : (inst.slater_slack
                                ? DualBound(horizon, *inst.slater_slack)
                                : throw MissingSlaterSlackError(
                                      "chi requested by formula but no Slater slack provided"));
  const double alpha = cfg.alpha >= 0.0 ? cfg.alpha : 1.0 / std::sqrt(cfg.episodes);
  const double eta =
      cfg.eta >= 0.0
          ? cfg.eta
          : std::sqrt(std::log(static_cast<double>(std::max(pi.size(), 2))) /
                      (cfg.episodes * (chi + 1.0) * (chi + 1.0) * horizon * horizon));
  const double beta_r = cfg.beta >= 0.0
                            ? cfg.beta
                            : SlackBeta(cfg.c, horizon, reward_classes.UnionSize(), cfg.episodes,
                                        mdp.horizon, pi.size(), cfg.delta);
  const double beta_g = cfg.beta >= 0.0
                            ? cfg.beta
                            : SlackBeta(cfg.c, horizon, utility_classes.UnionSize(),
                                        cfg.episodes, mdp.horizon, pi.size(), cfg.delta);

  CmdpResult result;
  result.eta = eta;
  result.beta_reward = beta_r;
  result.beta_utility = beta_g;
  result.alpha = alpha;
  result.chi = chi;
  result.telescoping_rhs = (horizon * horizon + chi * chi) * std::sqrt(cfg.episodes) / 2.0;

  Rng hyper_rng = MakeStream(cfg.seed, "hyper");
  Rng env_rng = MakeStream(cfg.seed, "env");

  // Two learners over the same episode stream (never resampled): one per
  // channel, sharing the hyperpolicy which lives in the reward learner.
  HedgeValueLearner reward_learner(pi, reward_classes.f_class, reward_classes.g_class,
                                   ShapeOf(mdp), mdp.horizon, 2, /*channel=*/0, mdp.start_state,
                                   eta, beta_r);
  HedgeValueLearner utility_learner(pi, utility_classes.f_class, utility_classes.g_class,
                                    ShapeOf(mdp), mdp.horizon, 2, /*channel=*/1, mdp.start_state,
                                    0.0, beta_g);

  const TabularPolicy trivial = TabularPolicy::Uniform(mdp.horizon, mdp.n_states, 1);
  std::vector<double> true_reward_by_id(pi.size());
  std::vector<double> true_utility_by_id(pi.size());
  for (int id = 0; id < pi.size(); ++id) {
    true_reward_by_id[id] = PolicyValue(mdp, pi[id], mdp.RewardTable(0));
    true_utility_by_id[id] = PolicyValue(mdp, pi[id], mdp.RewardTable(1));
  }
  const CmdpOptimum optimum = ConstrainedOptimum(inst, pi);
  if (!optimum.feasible_exists)
    throw ConfigError("no member of the policy class satisfies the constraint");

  double dual = 0.0;  // Y_1 = 0
  double cumulative_reward = 0.0;
  double cumulative_shortfall = 0.0;
  double telescoping_sum_shortfall = 0.0;      // sum_t (b - vbar_g(mu^t))
  double telescoping_sum_weighted = 0.0;       // sum_t (b - vbar_g(mu^t)) Y_t

  for (int t = 1; t <= cfg.episodes; ++t) {
    const int mu_id = reward_learner.ChoosePolicy(hyper_rng);
    Episode episode = SampleEpisode(mdp, pi[mu_id], trivial, env_rng);

    HedgeValueLearner::Evaluation eval_r = reward_learner.Evaluate(trivial, cfg.threads);
    HedgeValueLearner::Evaluation eval_g = utility_learner.Evaluate(trivial, cfg.threads);

    CmdpRecord rec;
    rec.t = t;
    rec.mu_id = mu_id;
    rec.vbar_reward = eval_r.values;
    rec.vbar_utility = eval_g.values;
    rec.dual = dual;

    for (int m = 0; m < pi.size(); ++m) {
      const int true_r = reward_classes.true_q_ids[m][0];
      const int true_g = utility_classes.true_q_ids[m][0];
      rec.optimism_frac_reward += (eval_r.required_slack[m][true_r] <= beta_r) ? 1.0 : 0.0;
      rec.optimism_frac_utility += (eval_g.required_slack[m][true_g] <= beta_g) ? 1.0 : 0.0;
    }
    rec.optimism_frac_reward /= pi.size();
    rec.optimism_frac_utility /= pi.size();

    // Hedge on the Lagrangian estimate vbar_r + Y_t vbar_g.
    std::vector<double> hedge_reward(pi.size());
    for (int m = 0; m < pi.size(); ++m)
      hedge_reward[m] = eval_r.values[m] + dual * eval_g.values[m];
    reward_learner.HedgeStep(hedge_reward, HedgeSign::kAscent);
    reward_learner.Absorb(episode);
    utility_learner.Absorb(episode);

    // Projected dual step on the estimated shortfall.
    const double grad = inst.threshold - eval_g.values[mu_id];
    telescoping_sum_shortfall += grad;
    telescoping_sum_weighted += grad * dual;
    double next_dual = std::clamp(dual + alpha * grad, 0.0, chi);
    if (!(next_dual >= 0.0 && next_dual <= chi)) result.dual_in_range = false;
    dual = next_dual;

    rec.true_reward = true_reward_by_id[mu_id];
    rec.shortfall = inst.threshold - true_utility_by_id[mu_id];
    cumulative_reward += rec.true_reward;
    cumulative_shortfall += rec.shortfall;
    rec.regret_to_date = t * optimum.reward_value - cumulative_reward;
    rec.violation_to_date = PositivePart(cumulative_shortfall);

    result.mu_sequence.push_back(mu_id);
    result.records.push_back(std::move(rec));
  }

  // max over Y in [0, chi] of sum_t (b - vbar_g(mu^t)) (Y - Y_t) is attained
  // at an endpoint; evaluate both.
  const double lhs_at_zero = -telescoping_sum_weighted;
  const double lhs_at_chi = chi * telescoping_sum_shortfall - telescoping_sum_weighted;
  result.telescoping_lhs = std::max(lhs_at_zero, lhs_at_chi);

  result.final_regret = result.records.back().regret_to_date;
  result.final_violation = result.records.back().violation_to_date;
  return result;
}

}  // namespace doris
