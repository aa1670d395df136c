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

#include "doris/policy.hpp"

using namespace doris;

TEST_CASE("zero learning rate leaves the hyperpolicy unchanged") {
  Hyperpolicy p(3);
  std::vector<double> rewards{5.0, -1.0, 2.0};
  Hyperpolicy q = p.HedgeUpdated(rewards, 0.0, HedgeSign::kAscent);
  for (int i = 0; i < 3; ++i) CHECK(q.Weight(i) == doctest::Approx(p.Weight(i)).epsilon(1e-15));
}

TEST_CASE("hand-computed exponential weights update") {
  // Uniform over two, rewards (1, 0), eta = ln 2, ascent:
  // weights proportional to (e^{ln 2}, 1) = (2, 1) -> (2/3, 1/3).
  Hyperpolicy p(2);
  std::vector<double> rewards{1.0, 0.0};
  Hyperpolicy q = p.HedgeUpdated(rewards, std::log(2.0), HedgeSign::kAscent);
  CHECK(q.Weight(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(q.Weight(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("descent sign flips the update direction") {
  Hyperpolicy p(2);
  std::vector<double> rewards{1.0, 0.0};
  Hyperpolicy q = p.HedgeUpdated(rewards, std::log(2.0), HedgeSign::kDescent);
  CHECK(q.Weight(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("reward shift invariance") {
  Hyperpolicy p(4);
  std::vector<double> rewards{0.3, -0.2, 0.9, 0.0};
  std::vector<double> shifted{10.3, 9.8, 10.9, 10.0};
  Hyperpolicy a = p.HedgeUpdated(rewards, 0.7, HedgeSign::kAscent);
  Hyperpolicy b = p.HedgeUpdated(shifted, 0.7, HedgeSign::kAscent);
  for (int i = 0; i < 4; ++i) CHECK(a.Weight(i) == doctest::Approx(b.Weight(i)).epsilon(1e-12));
}

TEST_CASE("sequential updates equal one summed update") {
  Hyperpolicy p(3);
  std::vector<double> r1{0.5, 0.1, -0.3};
  std::vector<double> r2{-0.2, 0.4, 0.8};
  std::vector<double> sum{0.3, 0.5, 0.5};
  Hyperpolicy sequential =
      p.HedgeUpdated(r1, 0.3, HedgeSign::kAscent).HedgeUpdated(r2, 0.3, HedgeSign::kAscent);
  Hyperpolicy joint = p.HedgeUpdated(sum, 0.3, HedgeSign::kAscent);
  for (int i = 0; i < 3; ++i)
    CHECK(sequential.Weight(i) == doctest::Approx(joint.Weight(i)).epsilon(1e-12));
}

TEST_CASE("thousands of updates keep the simplex exact in log space") {
  Hyperpolicy p(5);
  std::vector<double> rewards{3.0, 1.0, 0.5, 2.0, 0.0};
  for (int t = 0; t < 5000; ++t) p = p.HedgeUpdated(rewards, 0.05, HedgeSign::kAscent);
  double total = 0.0;
  for (int i = 0; i < 5; ++i) total += p.Weight(i);
  CHECK(std::abs(total - 1.0) <= 1e-12);
  // Linear-space weights would have overflowed/underflowed long ago; the
  // dominant entry carries essentially all the mass.
  CHECK(p.Weight(0) > 0.999);
}

TEST_CASE("non-finite rewards are rejected") {
  Hyperpolicy p(2);
  std::vector<double> bad{1.0, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(p.HedgeUpdated(bad, 0.1, HedgeSign::kAscent), NonFiniteRewardError);
}

TEST_CASE("point mass sampling always returns the supported id") {
  std::vector<double> lw{-1e30, 0.0, -1e30};
  Hyperpolicy p(lw);
  Rng rng = MakeStream(1, "hyper");
  for (int i = 0; i < 100; ++i) CHECK(p.Sample(rng) == 1);
}

TEST_CASE("uniform sampling frequencies stay within four sigma") {
  Hyperpolicy p(4);
  Rng rng = MakeStream(11, "hyper");
  const int n = 100000;
  int counts[4] = {0, 0, 0, 0};
  for (int i = 0; i < n; ++i) counts[p.Sample(rng)]++;
  // Binomial(n, 1/4): sigma = sqrt(n * 1/4 * 3/4).
  const double sigma = std::sqrt(n * 0.25 * 0.75);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(counts[i] - n * 0.25) <= 4.0 * sigma);
}

TEST_CASE("same seed gives the same draw") {
  Hyperpolicy p(7);
  Rng a = MakeStream(42, "hyper");
  Rng b = MakeStream(42, "hyper");
  for (int i = 0; i < 50; ++i) CHECK(p.Sample(a) == p.Sample(b));
}

TEST_CASE("product of deterministic policies is deterministic") {
  TabularPolicy mu = TabularPolicy::Constant(1, 1, 2, 1);
  TabularPolicy nu = TabularPolicy::Constant(1, 1, 3, 2);
  TabularPolicy pols[2] = {mu, nu};
  auto joint = JointActionProbs(pols, 0, 0);
  REQUIRE(joint.size() == 6);
  for (size_t j = 0; j < 6; ++j) CHECK(joint[j] == ((j == 1 * 3 + 2) ? 1.0 : 0.0));
}

TEST_CASE("uniform product and marginalizing back") {
  TabularPolicy mu = TabularPolicy::Uniform(2, 2, 2);
  TabularPolicy nu = TabularPolicy::Uniform(2, 2, 2);
  TabularPolicy pols[2] = {mu, nu};
  auto joint = JointActionProbs(pols, 1, 0);
  for (double v : joint) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));

  // Row sums over either axis recover the factors.
  TabularPolicy skewed = TabularPolicy::ActionMix(2, 2, std::vector<double>{0.7, 0.3});
  TabularPolicy pols2[2] = {skewed, nu};
  auto joint2 = JointActionProbs(pols2, 0, 1);
  CHECK(joint2[0] + joint2[1] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(joint2[2] + joint2[3] == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("meta opponent policy collapses the others row-major") {
  TabularPolicy a = TabularPolicy::ActionMix(1, 1, std::vector<double>{0.6, 0.4});
  TabularPolicy b = TabularPolicy::ActionMix(1, 1, std::vector<double>{0.1, 0.9});
  TabularPolicy c = TabularPolicy::ActionMix(1, 1, std::vector<double>{0.5, 0.5});
  TabularPolicy pols[3] = {a, b, c};
  TabularPolicy meta = MetaOpponentPolicy(pols, 0);  // collapses b x c
  REQUIRE(meta.n_actions == 4);
  CHECK(meta.Prob(0, 0, 0) == doctest::Approx(0.05).epsilon(1e-12));   // b=0,c=0
  CHECK(meta.Prob(0, 0, 3) == doctest::Approx(0.45).epsilon(1e-12));   // b=1,c=1
}

TEST_CASE("mixture marginal consolidates duplicate ids") {
  MixturePolicy mix = UniformMixture({{0, 1}, {0, 0}, {2, 1}, {0, 1}});
  auto marginal0 = mix.Marginal(0);
  // id 0 appears three times, id 2 once.
  REQUIRE(marginal0.size() == 2);
  CHECK(marginal0[0].first == 0);
  CHECK(marginal0[0].second == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(marginal0[1].first == 2);
  CHECK(marginal0[1].second == doctest::Approx(0.25).epsilon(1e-12));
  auto marginal1 = mix.Marginal(1);
  CHECK(marginal1[0].second == doctest::Approx(0.25).epsilon(1e-12));  // id 0
  CHECK(marginal1[1].second == doctest::Approx(0.75).epsilon(1e-12));  // id 1
}

TEST_CASE("random policy classes are reproducible and valid") {
  PolicyClass a = RandomStochasticPolicies(5, 3, 2, 3, 9);
  PolicyClass b = RandomStochasticPolicies(5, 3, 2, 3, 9);
  REQUIRE(a.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(IsValidPolicy(a[i]));
    CHECK(a[i].probs == b[i].probs);
  }
  PolicyClass d = RandomDeterministicPolicies(4, 2, 2, 3, 1);
  for (int i = 0; i < 4; ++i) CHECK(IsValidPolicy(d[i]));
}

TEST_CASE("meta opponent class indexing matches profile encoding") {
  std::vector<PolicyClass> classes(3);
  classes[0] = RandomDeterministicPolicies(2, 1, 1, 2, 1);
  classes[1] = RandomDeterministicPolicies(3, 1, 1, 2, 2);
  classes[2] = RandomDeterministicPolicies(2, 1, 1, 2, 3);
  PolicyClass meta = MetaOpponentClass(classes, 0);
  REQUIRE(meta.size() == 6);
  std::vector<int> profile{1, 2, 1};
  int idx = MetaProfileIndex(classes, profile, 0);
  CHECK(idx == 2 * 2 + 1);
  // The entry equals the meta policy of exactly those member policies.
  TabularPolicy pols[2] = {classes[1][2], classes[2][1]};
  TabularPolicy expect = MetaOpponentPolicy(pols, -1);
  CHECK(meta[idx].probs == expect.probs);
}
