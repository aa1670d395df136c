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

#include "doris/function_class.hpp"

using namespace doris;

namespace {

TabularMarkovGame RandomGame(uint64_t seed) {
  RandomGameSpec spec;
  spec.n_states = 3;
  spec.horizon = 3;
  spec.agent_action_counts = {2, 2};
  spec.seed = seed;
  return GenRandomGame(spec);
}

TabularMarkovGame DeterministicMdp() {
  // Single-agent 2-state toggle with action-dependent rewards; transitions
  // and rewards are deterministic so every exact residual vanishes.
  TabularMarkovGame g;
  g.n_states = 2;
  g.horizon = 3;
  g.start_state = 0;
  g.agent_action_counts = {2};
  g.transitions.assign(3 * 2 * 2 * 2, 0.0);
  g.rewards = {std::vector<double>(3 * 2 * 2, 0.0)};
  for (int h = 0; h < 3; ++h)
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) {
        g.transitions[((static_cast<size_t>(h) * 2 + s) * 2 + a) * 2 + ((s + a) % 2)] = 1.0;
        g.rewards[0][(static_cast<size_t>(h) * 2 + s) * 2 + a] = (a == s) ? 1.0 : 0.25;
      }
  return g;
}

}  // namespace

TEST_CASE("marginalize: constants, point masses, uniform averages") {
  TableShape shape{1, 2, 2};
  std::vector<double> table{0.5, 0.5, 0.5, 0.5};
  TabularPolicy mu = TabularPolicy::Uniform(1, 1, 2);
  TabularPolicy nu = TabularPolicy::Uniform(1, 1, 2);
  CHECK(MarginalizeTable(table, shape, mu, nu, 0, 0) == doctest::Approx(0.5).epsilon(1e-15));

  std::vector<double> spread{1.0, 2.0, 3.0, 4.0};
  TabularPolicy da = TabularPolicy::Constant(1, 1, 2, 1);
  TabularPolicy db = TabularPolicy::Constant(1, 1, 2, 0);
  CHECK(MarginalizeTable(spread, shape, da, db, 0, 0) == 3.0);  // entry (a=1, b=0)
  CHECK(MarginalizeTable(spread, shape, mu, nu, 0, 0) ==
        doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("empirical loss of an empty dataset is zero") {
  TableShape shape{2, 2, 1};
  std::vector<double> xi(shape.cells(), 0.3);
  TabularPolicy mu = TabularPolicy::Uniform(2, 2, 2);
  TabularPolicy nu = TabularPolicy::Uniform(2, 2, 1);
  CHECK(EmpiricalLoss(shape, xi, {}, mu, nu, {}, 0, 0) == 0.0);
}

TEST_CASE("exact backups have zero residual on a deterministic game") {
  TabularMarkovGame g = DeterministicMdp();
  PolicyClass pi = RandomStochasticPolicies(1, 3, 2, 2, 7);
  TabularPolicy nu = TabularPolicy::Uniform(3, 2, 1);
  ValueTables exact = QValues(g, pi[0], g.RewardTable(0));
  TableShape shape = ShapeOf(g);

  Rng rng = MakeStream(2, "env");
  std::vector<Episode> data;
  for (int i = 0; i < 20; ++i) data.push_back(SampleEpisode(g, pi[0], nu, rng));

  for (int h = 0; h < g.horizon; ++h) {
    std::span<const double> next =
        (h + 1 < g.horizon) ? exact.StepQ(h + 1) : std::span<const double>{};
    double loss = EmpiricalLoss(shape, exact.StepQ(h), next, pi[0], nu, data, h, 0);
    CHECK(loss <= 1e-20);
  }
}

TEST_CASE("two-episode loss matches hand arithmetic") {
  // One state, one action pair, H = 1: the residual is xi - r with r the
  // observed reward, summed over episodes.
  TableShape shape{1, 1, 1};
  std::vector<double> xi{0.8};
  Episode e1, e2;
  e1.steps.push_back({0, 0, 0, {0.5}});
  e1.final_state = 0;
  e2.steps.push_back({0, 0, 0, {1.0}});
  e2.final_state = 0;
  std::vector<Episode> data{e1, e2};
  TabularPolicy mu = TabularPolicy::Uniform(1, 1, 1);
  double loss = EmpiricalLoss(shape, xi, {}, mu, mu, data, 0, 0);
  // (0.8-0.5)^2 + (0.8-1.0)^2 = 0.09 + 0.04
  CHECK(loss == doctest::Approx(0.13).epsilon(1e-12));
}

TEST_CASE("loss is additive over concatenated data and order invariant") {
  TabularMarkovGame g = RandomGame(5);
  PolicyClass pi = RandomStochasticPolicies(2, 3, 3, 2, 9);
  TableShape shape = ShapeOf(g);
  Rng rng = MakeStream(3, "env");
  std::vector<Episode> a, b;
  for (int i = 0; i < 6; ++i) a.push_back(SampleEpisode(g, pi[0], pi[1], rng));
  for (int i = 0; i < 5; ++i) b.push_back(SampleEpisode(g, pi[0], pi[1], rng));
  std::vector<Episode> both = a;
  both.insert(both.end(), b.begin(), b.end());
  std::vector<Episode> reversed(both.rbegin(), both.rend());

  std::vector<double> xi(shape.cells());
  std::vector<double> zeta(shape.cells());
  Rng vals = MakeStream(4, "vals");
  for (auto& v : xi) v = vals.NextDouble();
  for (auto& v : zeta) v = vals.NextDouble();

  double la = EmpiricalLoss(shape, xi, zeta, pi[0], pi[1], a, 1, 0);
  double lb = EmpiricalLoss(shape, xi, zeta, pi[0], pi[1], b, 1, 0);
  double lboth = EmpiricalLoss(shape, xi, zeta, pi[0], pi[1], both, 1, 0);
  double lrev = EmpiricalLoss(shape, xi, zeta, pi[0], pi[1], reversed, 1, 0);
  CHECK(la + lb == doctest::Approx(lboth).epsilon(1e-12));
  CHECK(lboth == doctest::Approx(lrev).epsilon(1e-12));
  CHECK(la >= 0.0);
}

TEST_CASE("builder with singleton classes and no distractors") {
  TabularMarkovGame g = RandomGame(11);
  PolicyClass pi = RandomStochasticPolicies(1, 3, 3, 2, 13);
  PolicyClass nu = RandomStochasticPolicies(1, 3, 3, 2, 14);
  ClassBuildSpec spec;
  spec.distractors = 0;
  BuiltClasses classes = BuildRealizableClasses(g, pi, nu, g.RewardTable(0), spec);
  CHECK(classes.f_class.size() == 1);
  ValueTables exact = QValues(g, pi[0], nu[0], g.RewardTable(0));
  for (size_t i = 0; i < exact.q.size(); ++i)
    CHECK(classes.f_class[0].tables[i] == exact.q[i]);
}

TEST_CASE("every built member respects the value range after clipping") {
  TabularMarkovGame g = RandomGame(13);
  PolicyClass pi = RandomStochasticPolicies(3, 3, 3, 2, 15);
  PolicyClass nu = RandomStochasticPolicies(2, 3, 3, 2, 16);
  ClassBuildSpec spec;
  spec.distractors = 8;
  spec.perturb_scale = 0.5;
  BuiltClasses classes = BuildRealizableClasses(g, pi, nu, g.RewardTable(0), spec);
  CHECK(CheckRange(classes, g.VMax()).empty());
}

TEST_CASE("builder certificates: realizability and completeness are exact") {
  TabularMarkovGame g = RandomGame(17);
  PolicyClass pi = RandomStochasticPolicies(3, 3, 3, 2, 18);
  PolicyClass nu = RandomStochasticPolicies(2, 3, 3, 2, 19);
  ClassBuildSpec spec;
  spec.distractors = 4;
  BuiltClasses classes = BuildRealizableClasses(g, pi, nu, g.RewardTable(0), spec);
  CHECK(CheckRealizability(g, pi, nu, g.RewardTable(0), classes).empty());
  CHECK(CheckCompleteness(g, pi, nu, g.RewardTable(0), classes).empty());
  // Provenance points at exact members.
  for (int m = 0; m < pi.size(); ++m)
    for (int n = 0; n < nu.size(); ++n) {
      ValueTables exact = QValues(g, pi[m], nu[n], g.RewardTable(0));
      const QFunction& f = classes.f_class[classes.true_q_ids[m][n]];
      for (size_t i = 0; i < exact.q.size(); ++i)
        CHECK(std::abs(f.tables[i] - exact.q[i]) <= 1e-12);
    }
}

TEST_CASE("a corrupted class fails realizability and names the pair") {
  TabularMarkovGame g = RandomGame(23);
  PolicyClass pi = RandomStochasticPolicies(2, 3, 3, 2, 20);
  PolicyClass nu = RandomStochasticPolicies(2, 3, 3, 2, 21);
  ClassBuildSpec spec;
  spec.distractors = 0;
  BuiltClasses classes = BuildRealizableClasses(g, pi, nu, g.RewardTable(0), spec);
  const int victim = classes.true_q_ids[1][0];
  for (double& v : classes.f_class.members[victim].tables) v = 0.0;
  auto failures = CheckRealizability(g, pi, nu, g.RewardTable(0), classes);
  REQUIRE_FALSE(failures.empty());
  bool named = false;
  for (const auto& f : failures)
    if (f.mu_id == 1 && f.nu_id == 0) named = true;
  CHECK(named);
}

TEST_CASE("class dump and load round trip") {
  TabularMarkovGame g = RandomGame(29);
  PolicyClass pi = RandomStochasticPolicies(2, 3, 3, 2, 22);
  PolicyClass nu = RandomStochasticPolicies(1, 3, 3, 2, 23);
  ClassBuildSpec spec;
  spec.distractors = 2;
  BuiltClasses classes = BuildRealizableClasses(g, pi, nu, g.RewardTable(0), spec);
  std::string text = ClassesToJson(classes);
  BuiltClasses parsed = ClassesFromJson(text);
  CHECK(parsed.f_class.size() == classes.f_class.size());
  CHECK(parsed.true_q_ids == classes.true_q_ids);
  for (int i = 0; i < classes.f_class.size(); ++i)
    CHECK(parsed.f_class[i].tables == classes.f_class[i].tables);
  CHECK(ClassesToJson(parsed) == text);
}

TEST_CASE("vector classes certify per dimension") {
  VmdpInstance inst;
  RandomGameSpec spec;
  spec.n_states = 2;
  spec.horizon = 2;
  spec.agent_action_counts = {2};
  spec.reward_channels = 2;
  spec.seed = 31;
  inst.mdp = GenRandomGame(spec);
  inst.reward_dim = 2;
  inst.target.vertices = {{1.0, 1.0}};
  PolicyClass pi = RandomStochasticPolicies(3, 2, 2, 2, 24);
  ClassBuildSpec cs;
  cs.distractors = 3;
  VectorBuiltClasses classes = BuildVectorClasses(inst, pi, cs);
  CHECK(classes.size() >= 3);
  CHECK(CheckVectorRealizability(inst, pi, classes).empty());
  CHECK(CheckVectorCompleteness(inst, pi, classes).empty());
  for (int m = 0; m < pi.size(); ++m) CHECK(classes.true_q_ids[m] >= 0);
}

TEST_CASE("duplicate exact values share one member") {
  // In matching pennies every policy pair has the same one-step Q (the
  // reward table), so the class deduplicates to a single exact member.
  TabularMarkovGame g = MakeMatchingPennies();
  PolicyClass pi, nu;
  pi.policies.push_back(TabularPolicy::Constant(1, 1, 2, 0));
  pi.policies.push_back(TabularPolicy::Constant(1, 1, 2, 1));
  nu = pi;
  ClassBuildSpec spec;
  spec.distractors = 0;
  BuiltClasses classes = BuildRealizableClasses(g, pi, nu, g.RewardTable(0), spec);
  CHECK(classes.f_class.size() == 1);
  for (const auto& row : classes.true_q_ids)
    for (int id : row) CHECK(id == 0);
}
