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

#ifndef DORIS_POLICY_HPP_
#define DORIS_POLICY_HPP_

#include <span>
#include <string>
#include <vector>

#include "doris/common.hpp"
#include "doris/rng.hpp"

namespace doris {

// A per-step tabular stochastic policy over one agent's own actions.
// probs is row-major [h][s][a]; every (h, s) row is a distribution.
struct TabularPolicy {
  int horizon = 0;
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> probs;

  std::span<const double> Row(int h, int s) const {
    return {probs.data() + (static_cast<size_t>(h) * n_states + s) * n_actions,
            static_cast<size_t>(n_actions)};
  }
  double Prob(int h, int s, int a) const {
    return probs[(static_cast<size_t>(h) * n_states + s) * n_actions + a];
  }

  static TabularPolicy Uniform(int horizon, int n_states, int n_actions);
  // Plays `action` in every (h, s).
  static TabularPolicy Constant(int horizon, int n_states, int n_actions, int action);
  // Plays the same action distribution in every (h, s).
  static TabularPolicy ActionMix(int horizon, int n_states, std::span<const double> action_probs);
};

// Rows must sum to 1 within `tol` with no negative entries.
bool IsValidPolicy(const TabularPolicy& p, double tol = 1e-12);

// FNV-style content hash over the probability table bit patterns; used as a
// memoization key for opponents that are not members of an indexed class.
uint64_t PolicyContentHash(const TabularPolicy& p);

// A finite ordered set of policies. Ids are positions and stay stable.
struct PolicyClass {
  std::vector<TabularPolicy> policies;

  int size() const { return static_cast<int>(policies.size()); }
  const TabularPolicy& operator[](int id) const { return policies[id]; }
};

// Random policy class generators (Dirichlet(1) rows / uniform deterministic
// choices), reproducible from the seed.
PolicyClass RandomStochasticPolicies(int count, int horizon, int n_states, int n_actions,
                                     uint64_t seed);
PolicyClass RandomDeterministicPolicies(int count, int horizon, int n_states, int n_actions,
                                        uint64_t seed);

enum class HedgeSign { kAscent, kDescent };

// A distribution over the members of a PolicyClass, kept in log-space.
// Multiplicative-weights updates just add eta * reward to the log weights;
// normalization subtracts the logsumexp so thousands of updates cannot
// underflow.
class Hyperpolicy {
 public:
  explicit Hyperpolicy(int n);
  explicit Hyperpolicy(std::vector<double> log_weights);

  int size() const { return static_cast<int>(log_weights_.size()); }
  // Normalized probability of entry i.
  double Weight(int i) const;
  std::vector<double> Weights() const;
  double Entropy() const;

  // p'(i) proportional to p(i) * exp(sign * eta * rewards[i]). Inputs must be
  // finite; eta >= 0. Returns a new value, the input is unchanged.
  Hyperpolicy HedgeUpdated(std::span<const double> rewards, double eta, HedgeSign sign) const;

  // Draws an id distributed per the current weights.
  int Sample(Rng& rng) const;

 private:
  void Normalize();
  std::vector<double> log_weights_;  // normalized: LogSumExp(log_weights_) == 0
};

// Joint action distribution of independent per-agent policies at (h, s),
// row-major over agents. Marginalizing it back recovers the factors.
std::vector<double> JointActionProbs(std::span<const TabularPolicy> agents, int h, int s);

// Collapses the policies of all agents except `skip_agent` into one policy
// over the row-major product action space (the meta-opponent view). Pass
// skip_agent = -1 to collapse everyone.
TabularPolicy MetaOpponentPolicy(std::span<const TabularPolicy> agents, int skip_agent);

// The meta-opponent policy class seen by `skip_agent`: one entry per
// row-major combination of the other agents' policy ids, in that order, so
// combination indices and class ids agree everywhere.
PolicyClass MetaOpponentClass(std::span<const PolicyClass> agent_classes, int skip_agent);

// Row-major index of the others' ids within MetaOpponentClass ordering.
int MetaProfileIndex(std::span<const PolicyClass> agent_classes, std::span<const int> profile,
                     int skip_agent);

// A weighted finite mixture of product policy profiles; profile k assigns
// policy id profile_ids[k][i] to agent i. Weights form a distribution.
struct MixturePolicy {
  std::vector<std::vector<int>> profile_ids;
  std::vector<double> weights;

  int size() const { return static_cast<int>(profile_ids.size()); }
  // The agent-i marginal: ids into agent i's class with the same weights,
  // consolidated over duplicate ids.
  std::vector<std::pair<int, double>> Marginal(int agent) const;
};

MixturePolicy UniformMixture(std::vector<std::vector<int>> profiles);

}  // namespace doris

#endif  // DORIS_POLICY_HPP_
