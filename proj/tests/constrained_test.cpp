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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "doris/constrained.hpp"
#include "doris/harness.hpp"

using namespace doris;

namespace {

PolicyClass MixClass(int horizon, std::initializer_list<double> action1_probs) {
  PolicyClass pi;
  for (double p : action1_probs)
    pi.policies.push_back(TabularPolicy::ActionMix(horizon, 2, std::vector<double>{1.0 - p, p}));
  return pi;
}

struct CmdpFixture {
  CmdpInstance inst;
  PolicyClass pi;
  BuiltClasses reward_classes;
  BuiltClasses utility_classes;
};

CmdpFixture MakeCmdpFixture(double threshold = 1.8) {
  CmdpFixture f;
  f.inst = MakeActionTradeoffCmdp(3, threshold);
  f.inst.slater_slack = 1.2;
  f.inst.slater_witness = 5;
  f.pi = MixClass(3, {0.0, 0.25, 0.5, 0.65, 0.8, 1.0});
  ClassBuildSpec cs;
  cs.distractors = 3;
  cs.seed = 5;
  f.reward_classes =
      BuildRealizableClassesSingle(f.inst.mdp, f.pi, f.inst.mdp.RewardTable(0), cs);
  cs.seed = 6;
  f.utility_classes =
      BuildRealizableClassesSingle(f.inst.mdp, f.pi, f.inst.mdp.RewardTable(1), cs);
  return f;
}

}  // namespace

TEST_CASE("dual cap arithmetic and the missing-slack error") {
  CHECK(DualBound(3.0, 0.5) == doctest::Approx(12.0).epsilon(1e-15));
  CHECK(DualBound(3.0, 1e12) == 1e-6);  // floored as the slack grows
  CHECK_THROWS_AS(DualBound(3.0, 0.0), MissingSlaterSlackError);
  CHECK_THROWS_AS(DualBound(3.0, -1.0), MissingSlaterSlackError);
}

TEST_CASE("the tradeoff instance trades the channels linearly") {
  CmdpInstance inst = MakeActionTradeoffCmdp(3, 1.8);
  REQUIRE(ValidateCmdp(inst).ok());
  PolicyClass pi = MixClass(3, {0.0, 0.5, 1.0});
  CHECK(PolicyValue(inst.mdp, pi[0], inst.mdp.RewardTable(0)) ==
        doctest::Approx(3.0).epsilon(1e-12));
  CHECK(PolicyValue(inst.mdp, pi[0], inst.mdp.RewardTable(1)) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(PolicyValue(inst.mdp, pi[1], inst.mdp.RewardTable(1)) ==
        doctest::Approx(1.5).epsilon(1e-12));
  CHECK(PolicyValue(inst.mdp, pi[2], inst.mdp.RewardTable(1)) ==
        doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("brute-forced constrained optimum picks the best feasible member") {
  CmdpFixture f = MakeCmdpFixture();
  CmdpOptimum opt = ConstrainedOptimum(f.inst, f.pi);
  REQUIRE(opt.feasible_exists);
  // Feasible mixes need 3p >= 1.8, so p in {0.65, 0.8, 1.0}; the reward
  // 3(1-p) is maximized at p = 0.65.
  CHECK(opt.best_id == 3);
  CHECK(opt.reward_value == doctest::Approx(3.0 * 0.35).epsilon(1e-12));

  // Infeasible classes are rejected at run time.
  PolicyClass bad = MixClass(3, {0.0, 0.1});
  CHECK_FALSE(ConstrainedOptimum(f.inst, bad).feasible_exists);
  CmdpConfig cfg;
  cfg.episodes = 5;
  ClassBuildSpec cs;
  BuiltClasses rc = BuildRealizableClassesSingle(f.inst.mdp, bad, f.inst.mdp.RewardTable(0), cs);
  BuiltClasses uc = BuildRealizableClassesSingle(f.inst.mdp, bad, f.inst.mdp.RewardTable(1), cs);
  CmdpInstance no_slack = f.inst;
  no_slack.slater_slack.reset();
  no_slack.slater_witness.reset();
  CHECK_THROWS_AS(RunConstrained(no_slack, bad, rc, uc, cfg), MissingSlaterSlackError);
  cfg.chi = 5.0;
  CHECK_THROWS_AS(RunConstrained(no_slack, bad, rc, uc, cfg), ConfigError);
}

TEST_CASE("a lying Slater witness is rejected") {
  CmdpFixture f = MakeCmdpFixture();
  f.inst.slater_witness = 0;  // V_g = 0 < b + slack
  CmdpConfig cfg;
  cfg.episodes = 5;
  CHECK_THROWS_AS(RunConstrained(f.inst, f.pi, f.reward_classes, f.utility_classes, cfg),
                  ConfigError);
}

TEST_CASE("always-feasible utility keeps the dual at zero and violation empty") {
  // g = 1 everywhere: every policy is feasible with V_g = H >= b, the dual
  // gradient stays non-positive, and the projection floor holds Y at zero.
  CmdpInstance inst = MakeActionTradeoffCmdp(3, 1.0);
  for (double& v : inst.mdp.rewards[1]) v = 1.0;
  inst.slater_slack = 2.0;
  inst.slater_witness = 0;
  PolicyClass pi = MixClass(3, {0.0, 0.5, 1.0});
  ClassBuildSpec cs;
  cs.distractors = 2;
  BuiltClasses rc = BuildRealizableClassesSingle(inst.mdp, pi, inst.mdp.RewardTable(0), cs);
  BuiltClasses uc = BuildRealizableClassesSingle(inst.mdp, pi, inst.mdp.RewardTable(1), cs);
  CmdpConfig cfg;
  cfg.episodes = 200;
  cfg.seed = 2;
  cfg.c = 0.05;
  CmdpResult res = RunConstrained(inst, pi, rc, uc, cfg);
  for (const CmdpRecord& rec : res.records) CHECK(rec.dual == 0.0);
  CHECK(res.final_violation == 0.0);
}

TEST_CASE("a frozen dual reduces to unconstrained reward maximization") {
  CmdpFixture f = MakeCmdpFixture();
  CmdpConfig cfg;
  cfg.episodes = 150;
  cfg.seed = 7;
  cfg.alpha = 0.0;
  cfg.c = 0.05;
  CmdpResult res = RunConstrained(f.inst, f.pi, f.reward_classes, f.utility_classes, cfg);
  for (const CmdpRecord& rec : res.records) CHECK(rec.dual == 0.0);
  // Reward-greedy play concentrates on the infeasible p = 0 policy, so the
  // violation grows with the horizon at roughly b per episode.
  CHECK(res.final_violation >= 0.5 * cfg.episodes * (f.inst.threshold - 1.0));
}

TEST_CASE("the primal-dual run meets its projection and telescoping contracts") {
  CmdpFixture f = MakeCmdpFixture();
  CmdpConfig cfg;
  cfg.episodes = 600;
  cfg.seed = 11;
  cfg.c = 0.05;
  CmdpResult res = RunConstrained(f.inst, f.pi, f.reward_classes, f.utility_classes, cfg);
  CHECK(res.dual_in_range);
  for (const CmdpRecord& rec : res.records) {
    CHECK(rec.dual >= 0.0);
    CHECK(rec.dual <= res.chi);
  }
  CHECK(res.telescoping_lhs <= res.telescoping_rhs + 1e-9);
  // Sanity on the dynamics at a modest horizon: time-averaged regret and
  // violation are already small.
  CHECK(res.final_regret / cfg.episodes <= 0.35);
  CHECK(res.final_violation / cfg.episodes <= 0.35);
}

TEST_CASE("metrics come from exact values, not the optimistic estimates") {
  CmdpFixture f = MakeCmdpFixture();
  CmdpConfig cfg;
  cfg.episodes = 50;
  cfg.seed = 13;
  CmdpResult res = RunConstrained(f.inst, f.pi, f.reward_classes, f.utility_classes, cfg);
  CmdpOptimum opt = ConstrainedOptimum(f.inst, f.pi);
  double played = 0.0;
  double shortfall = 0.0;
  for (const CmdpRecord& rec : res.records) {
    played += PolicyValue(f.inst.mdp, f.pi[rec.mu_id], f.inst.mdp.RewardTable(0));
    shortfall +=
        f.inst.threshold - PolicyValue(f.inst.mdp, f.pi[rec.mu_id], f.inst.mdp.RewardTable(1));
  }
  CHECK(res.final_regret ==
        doctest::Approx(cfg.episodes * opt.reward_value - played).epsilon(1e-9));
  CHECK(res.final_violation == doctest::Approx(PositivePart(shortfall)).epsilon(1e-9));
  // Cross-check the violation helper on the recorded sequence.
  CHECK(Violation(f.inst, f.pi, res.mu_sequence) ==
        doctest::Approx(res.final_violation).epsilon(1e-9));
}

TEST_CASE("dual trajectories are reproducible per seed") {
  CmdpFixture f = MakeCmdpFixture();
  CmdpConfig cfg;
  cfg.episodes = 80;
  cfg.seed = 17;
  CmdpResult a = RunConstrained(f.inst, f.pi, f.reward_classes, f.utility_classes, cfg);
  CmdpResult b = RunConstrained(f.inst, f.pi, f.reward_classes, f.utility_classes, cfg);
  REQUIRE(a.records.size() == b.records.size());
  for (size_t t = 0; t < a.records.size(); ++t) {
    CHECK(a.records[t].dual == b.records[t].dual);
    CHECK(a.records[t].mu_id == b.records[t].mu_id);
  }
}
