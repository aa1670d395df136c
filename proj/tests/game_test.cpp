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

#include "doris/dp.hpp"
#include "doris/game.hpp"

using namespace doris;

namespace {

TabularMarkovGame OneStateGame() {
  TabularMarkovGame g;
  g.n_states = 1;
  g.horizon = 2;
  g.start_state = 0;
  g.agent_action_counts = {1, 1};
  g.transitions = {1.0, 1.0};
  g.rewards = {{0.0, 0.0}, {0.0, 0.0}};
  return g;
}

}  // namespace

TEST_CASE("identity transition game with zero rewards is valid") {
  CHECK(Validate(OneStateGame()).ok());
}

TEST_CASE("row summing below one is flagged at its index path") {
  TabularMarkovGame g = OneStateGame();
  g.transitions[1] = 0.9;
  ValidationReport report = Validate(g);
  REQUIRE_FALSE(report.ok());
  CHECK(report.issues[0].code == "RowNotStochastic");
  CHECK(report.issues[0].where == "P[h=1][s=0][joint=0]");
}

TEST_CASE("out-of-range reward is flagged") {
  TabularMarkovGame g = OneStateGame();
  g.rewards[1][0] = 1.5;
  ValidationReport report = Validate(g);
  REQUIRE_FALSE(report.ok());
  CHECK(report.issues[0].code == "RewardOutOfRange");
  CHECK(report.issues[0].value == 1.5);
}

TEST_CASE("negative probability entries are not stochastic") {
  TabularMarkovGame g;
  g.n_states = 2;
  g.horizon = 1;
  g.start_state = 0;
  g.agent_action_counts = {1, 1};
  g.transitions = {1.5, -0.5, 1.0, 0.0};
  g.rewards = {std::vector<double>(2, 0.0)};
  ValidationReport report = Validate(g);
  REQUIRE_FALSE(report.ok());
  CHECK(report.issues[0].code == "RowNotStochastic");
}

TEST_CASE("deterministic game and policies yield one trajectory regardless of seed") {
  // 2-state chain: the single action always moves 0 -> 1 -> 1.
  TabularMarkovGame g;
  g.n_states = 2;
  g.horizon = 2;
  g.start_state = 0;
  g.agent_action_counts = {1, 1};
  g.transitions = {0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0};
  g.rewards = {{0.25, 0.5, 0.25, 0.5}, {0.0, 0.0, 0.0, 0.0}};
  REQUIRE(Validate(g).ok());
  TabularPolicy mu = TabularPolicy::Uniform(2, 2, 1);
  for (uint64_t seed : {1ull, 2ull, 99ull}) {
    Rng rng = MakeStream(seed, "env");
    Episode ep = SampleEpisode(g, mu, mu, rng);
    CHECK(ep.steps[0].state == 0);
    CHECK(ep.steps[1].state == 1);
    CHECK(ep.final_state == 1);
    CHECK(ep.steps[0].rewards[0] == 0.25);
    CHECK(ep.steps[1].rewards[0] == 0.5);
  }
}

TEST_CASE("same seed reproduces the same episode") {
  RandomGameSpec spec;
  spec.n_states = 3;
  spec.horizon = 4;
  spec.agent_action_counts = {2, 2};
  spec.seed = 5;
  TabularMarkovGame g = GenRandomGame(spec);
  TabularPolicy mu = TabularPolicy::Uniform(4, 3, 2);
  Rng a = MakeStream(7, "env");
  Rng b = MakeStream(7, "env");
  Episode ea = SampleEpisode(g, mu, mu, a);
  Episode eb = SampleEpisode(g, mu, mu, b);
  REQUIRE(ea.steps.size() == eb.steps.size());
  for (size_t h = 0; h < ea.steps.size(); ++h) {
    CHECK(ea.steps[h].state == eb.steps[h].state);
    CHECK(ea.steps[h].action == eb.steps[h].action);
    CHECK(ea.steps[h].opponent_action == eb.steps[h].opponent_action);
  }
  CHECK(ea.final_state == eb.final_state);
}

TEST_CASE("generator is reproducible and degenerate sizes are valid") {
  RandomGameSpec tiny;
  tiny.n_states = 1;
  tiny.horizon = 1;
  tiny.agent_action_counts = {1, 1};
  CHECK(Validate(GenRandomGame(tiny)).ok());

  RandomGameSpec spec;
  spec.n_states = 3;
  spec.horizon = 3;
  spec.agent_action_counts = {2, 2};
  spec.seed = 7;
  TabularMarkovGame a = GenRandomGame(spec);
  TabularMarkovGame b = GenRandomGame(spec);
  CHECK(a.transitions == b.transitions);
  CHECK(a.rewards == b.rewards);
  CHECK(Validate(a).ok());
}

TEST_CASE("matching pennies: uniform mixed profile is worth one half to both") {
  TabularMarkovGame g = MakeMatchingPennies();
  REQUIRE(Validate(g).ok());
  TabularPolicy uniform = TabularPolicy::Uniform(1, 1, 2);
  // Hand-solved 2x2 matrix game: the mixed uniform profile earns 1/2 per
  // agent, and every pure deviation against a uniform opponent earns 1/2 too.
  CHECK(PolicyValue(g, uniform, uniform, g.RewardTable(0)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(PolicyValue(g, uniform, uniform, g.RewardTable(1)) == doctest::Approx(0.5).epsilon(1e-12));
  for (int a = 0; a < 2; ++a) {
    TabularPolicy pure = TabularPolicy::Constant(1, 1, 2, a);
    CHECK(PolicyValue(g, pure, uniform, g.RewardTable(0)) ==
          doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("one-hot linear features reproduce an arbitrary tabular game") {
  RandomGameSpec spec;
  spec.n_states = 2;
  spec.horizon = 2;
  spec.agent_action_counts = {2, 2};
  spec.seed = 3;
  TabularMarkovGame g = GenRandomGame(spec);

  LinearGameFeatures f;
  const int joint = g.NumJointActions();
  f.dim = g.n_states * joint;
  f.n_states = g.n_states;
  f.horizon = g.horizon;
  f.agent_action_counts = g.agent_action_counts;
  f.start_state = g.start_state;
  f.phi.assign(static_cast<size_t>(g.horizon) * g.n_states * joint * f.dim, 0.0);
  f.psi.assign(static_cast<size_t>(g.horizon) * f.dim * g.n_states, 0.0);
  f.theta.assign(g.NumChannels(),
                 std::vector<double>(static_cast<size_t>(g.horizon) * f.dim, 0.0));
  for (int h = 0; h < g.horizon; ++h)
    for (int s = 0; s < g.n_states; ++s)
      for (int j = 0; j < joint; ++j) {
        int k = s * joint + j;
        f.phi[((static_cast<size_t>(h) * g.n_states + s) * joint + j) * f.dim + k] = 1.0;
        for (int s2 = 0; s2 < g.n_states; ++s2)
          f.psi[(static_cast<size_t>(h) * f.dim + k) * g.n_states + s2] =
              g.NextStateDist(h, s, j)[s2];
        for (int c = 0; c < g.NumChannels(); ++c)
          f.theta[c][static_cast<size_t>(h) * f.dim + k] = g.Reward(c, h, s, j);
      }
  TabularMarkovGame embedded = EmbedLinearGame(f);
  CHECK(embedded.transitions == g.transitions);
  CHECK(embedded.rewards == g.rewards);
}

TEST_CASE("two-dimensional features with simplex measures validate") {
  // phi rows live in the 2-simplex and the two measures are distributions,
  // so every induced transition row is a convex combination of distributions.
  LinearGameFeatures f;
  f.dim = 2;
  f.n_states = 2;
  f.horizon = 2;
  f.agent_action_counts = {2, 1};
  f.phi.assign(2 * 2 * 2 * 2, 0.0);
  f.psi.assign(2 * 2 * 2, 0.0);
  f.theta.assign(1, std::vector<double>(2 * 2, 0.0));
  for (int h = 0; h < 2; ++h) {
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) {
        double w = (s == a) ? 0.75 : 0.25;
        size_t base = ((static_cast<size_t>(h) * 2 + s) * 2 + a) * 2;
        f.phi[base] = w;
        f.phi[base + 1] = 1.0 - w;
      }
    f.psi[(static_cast<size_t>(h) * 2 + 0) * 2 + 0] = 1.0;  // point mass on state 0
    f.psi[(static_cast<size_t>(h) * 2 + 1) * 2 + 1] = 1.0;  // point mass on state 1
    f.theta[0][static_cast<size_t>(h) * 2 + 0] = 0.25;
    f.theta[0][static_cast<size_t>(h) * 2 + 1] = 0.75;
  }
  TabularMarkovGame g = EmbedLinearGame(f);
  CHECK(Validate(g).ok());
}

TEST_CASE("embedding with reward above one is rejected") {
  LinearGameFeatures f;
  f.dim = 1;
  f.n_states = 1;
  f.horizon = 1;
  f.agent_action_counts = {1};
  f.phi = {1.0};
  f.psi = {1.0};
  f.theta = {{1.2}};
  CHECK_THROWS_AS(EmbedLinearGame(f), NotAStochasticEmbeddingError);
}

TEST_CASE("game json round trip is byte identical") {
  RandomGameSpec spec;
  spec.n_states = 3;
  spec.horizon = 2;
  spec.agent_action_counts = {2, 3};
  spec.seed = 17;
  TabularMarkovGame g = GenRandomGame(spec);
  std::string once = GameToJson(g);
  TabularMarkovGame parsed = GameFromJson(once);
  CHECK(GameToJson(parsed) == once);
  CHECK(parsed.transitions == g.transitions);
  CHECK(parsed.rewards == g.rewards);
}

TEST_CASE("cmdp and vmdp json round trips preserve the extras") {
  CmdpInstance cmdp;
  RandomGameSpec spec;
  spec.n_states = 2;
  spec.horizon = 2;
  spec.agent_action_counts = {2};
  spec.reward_channels = 2;
  spec.seed = 4;
  cmdp.mdp = GenRandomGame(spec);
  cmdp.threshold = 1.25;
  cmdp.slater_slack = 0.5;
  cmdp.slater_witness = 2;
  std::string text = CmdpToJson(cmdp);
  CmdpInstance parsed = CmdpFromJson(text);
  CHECK(parsed.threshold == 1.25);
  CHECK(*parsed.slater_slack == 0.5);
  CHECK(*parsed.slater_witness == 2);
  CHECK(CmdpToJson(parsed) == text);

  VmdpInstance vmdp;
  vmdp.mdp = cmdp.mdp;
  vmdp.reward_dim = 2;
  vmdp.target.vertices = {{0.5, 1.5}, {1.5, 0.5}};
  std::string vtext = VmdpToJson(vmdp);
  VmdpInstance vparsed = VmdpFromJson(vtext);
  CHECK(vparsed.target.vertices == vmdp.target.vertices);
  CHECK(VmdpToJson(vparsed) == vtext);
}

TEST_CASE("view and episode view agree for the second agent") {
  RandomGameSpec spec;
  spec.n_states = 2;
  spec.horizon = 3;
  spec.agent_action_counts = {2, 3};
  spec.seed = 21;
  TabularMarkovGame g = GenRandomGame(spec);
  TabularMarkovGame view = ViewForAgent(g, 1);
  CHECK(view.PlayerActions() == 3);
  CHECK(view.OpponentActions() == 2);
  REQUIRE(Validate(view).ok());

  for (int h = 0; h < g.horizon; ++h)
    for (int s = 0; s < g.n_states; ++s)
      for (int a0 = 0; a0 < 2; ++a0)
        for (int a1 = 0; a1 < 3; ++a1) {
          int j = g.JointIndex(a0, a1);
          int jv = view.JointIndex(a1, a0);
          for (int s2 = 0; s2 < g.n_states; ++s2)
            CHECK(g.NextStateDist(h, s, j)[s2] == view.NextStateDist(h, s, jv)[s2]);
          CHECK(g.Reward(0, h, s, j) == view.Reward(1, h, s, jv));
          CHECK(g.Reward(1, h, s, j) == view.Reward(0, h, s, jv));
        }

  // Values computed in either view coincide.
  TabularPolicy mu = TabularPolicy::Uniform(3, 2, 2);
  TabularPolicy nu = TabularPolicy::Uniform(3, 2, 3);
  double v0 = PolicyValue(g, mu, nu, g.RewardTable(1));
  double v1 = PolicyValue(view, nu, mu, view.RewardTable(0));
  CHECK(v0 == doctest::Approx(v1).epsilon(1e-12));

  // Episode views permute actions and reward channels together.
  Rng rng = MakeStream(5, "env");
  TabularPolicy pols[2] = {mu, nu};
  Episode ep = SampleEpisode(g, pols, rng);
  Episode ev = EpisodeViewForAgent(ep, g.agent_action_counts, 1);
  for (size_t h = 0; h < ep.steps.size(); ++h) {
    CHECK(ev.steps[h].state == ep.steps[h].state);
    CHECK(ev.steps[h].action == ep.steps[h].opponent_action);
    CHECK(ev.steps[h].opponent_action == ep.steps[h].action);
    CHECK(ev.steps[h].rewards[0] == ep.steps[h].rewards[1]);
    CHECK(ev.steps[h].rewards[1] == ep.steps[h].rewards[0]);
  }
}
