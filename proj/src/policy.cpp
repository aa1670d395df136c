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

#include "doris/policy.hpp"

#include <algorithm>
#include <cstring>
#include <map>

namespace doris {

TabularPolicy TabularPolicy::Uniform(int horizon, int n_states, int n_actions) {
  TabularPolicy p{horizon, n_states, n_actions, {}};
  p.probs.assign(static_cast<size_t>(horizon) * n_states * n_actions, 1.0 / n_actions);
  return p;
}

TabularPolicy TabularPolicy::Constant(int horizon, int n_states, int n_actions, int action) {
  TabularPolicy p{horizon, n_states, n_actions, {}};
  p.probs.assign(static_cast<size_t>(horizon) * n_states * n_actions, 0.0);
  for (int h = 0; h < horizon; ++h)
    for (int s = 0; s < n_states; ++s)
      p.probs[(static_cast<size_t>(h) * n_states + s) * n_actions + action] = 1.0;
  return p;
}

TabularPolicy TabularPolicy::ActionMix(int horizon, int n_states,
                                       std::span<const double> action_probs) {
  const int n_actions = static_cast<int>(action_probs.size());
  TabularPolicy p{horizon, n_states, n_actions, {}};
  p.probs.resize(static_cast<size_t>(horizon) * n_states * n_actions);
  for (int h = 0; h < horizon; ++h)
    for (int s = 0; s < n_states; ++s)
      for (int a = 0; a < n_actions; ++a)
        p.probs[(static_cast<size_t>(h) * n_states + s) * n_actions + a] = action_probs[a];
  return p;
}

bool IsValidPolicy(const TabularPolicy& p, double tol) {
  if (p.probs.size() != static_cast<size_t>(p.horizon) * p.n_states * p.n_actions) return false;
  for (int h = 0; h < p.horizon; ++h) {
    for (int s = 0; s < p.n_states; ++s) {
      double sum = 0.0;
      for (double v : p.Row(h, s)) {
        if (v < 0.0 || !std::isfinite(v)) return false;
        sum += v;
      }
      if (std::abs(sum - 1.0) > tol) return false;
    }
  }
  return true;
}

uint64_t PolicyContentHash(const TabularPolicy& p) {
  uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<uint64_t>(p.horizon));
  mix(static_cast<uint64_t>(p.n_states));
  mix(static_cast<uint64_t>(p.n_actions));
  for (double d : p.probs) {
    uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    mix(bits);
  }
  return h;
}

PolicyClass RandomStochasticPolicies(int count, int horizon, int n_states, int n_actions,
                                     uint64_t seed) {
  Rng rng = MakeStream(seed, "policy-class-stochastic");
  PolicyClass cls;
  cls.policies.reserve(count);
  for (int i = 0; i < count; ++i) {
    TabularPolicy p{horizon, n_states, n_actions, {}};
    p.probs.resize(static_cast<size_t>(horizon) * n_states * n_actions);
    for (int h = 0; h < horizon; ++h) {
      for (int s = 0; s < n_states; ++s) {
        // Dirichlet(1) row via normalized exponentials.
        double sum = 0.0;
        size_t base = (static_cast<size_t>(h) * n_states + s) * n_actions;
        for (int a = 0; a < n_actions; ++a) {
          double e = rng.NextExponential();
          p.probs[base + a] = e;
          sum += e;
        }
        for (int a = 0; a < n_actions; ++a) p.probs[base + a] /= sum;
      }
    }
    cls.policies.push_back(std::move(p));
  }
  return cls;
}

PolicyClass RandomDeterministicPolicies(int count, int horizon, int n_states, int n_actions,
                                        uint64_t seed) {
  Rng rng = MakeStream(seed, "policy-class-deterministic");
  PolicyClass cls;
  cls.policies.reserve(count);
  for (int i = 0; i < count; ++i) {
    TabularPolicy p{horizon, n_states, n_actions, {}};
    p.probs.assign(static_cast<size_t>(horizon) * n_states * n_actions, 0.0);
    for (int h = 0; h < horizon; ++h)
      for (int s = 0; s < n_states; ++s) {
        int a = rng.NextIndex(n_actions);
        p.probs[(static_cast<size_t>(h) * n_states + s) * n_actions + a] = 1.0;
      }
    cls.policies.push_back(std::move(p));
  }
  return cls;
}

Hyperpolicy::Hyperpolicy(int n) : log_weights_(n, 0.0) {
  if (n <= 0) throw DorisError("Hyperpolicy: empty support");
  Normalize();
}

Hyperpolicy::Hyperpolicy(std::vector<double> log_weights) : log_weights_(std::move(log_weights)) {
  if (log_weights_.empty()) throw DorisError("Hyperpolicy: empty support");
  Normalize();
}

void Hyperpolicy::Normalize() {
  double lse = LogSumExp(log_weights_);
  if (!std::isfinite(lse)) throw DorisError("Hyperpolicy: non-finite normalizer");
  for (double& w : log_weights_) w -= lse;
}

double Hyperpolicy::Weight(int i) const { return std::exp(log_weights_[i]); }

std::vector<double> Hyperpolicy::Weights() const {
  std::vector<double> w(log_weights_.size());
  for (size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights_[i]);
  return w;
}

double Hyperpolicy::Entropy() const {
  double e = 0.0;
  for (double lw : log_weights_) {
    double w = std::exp(lw);
    if (w > 0.0) e -= w * lw;
  }
  return e;
}

Hyperpolicy Hyperpolicy::HedgeUpdated(std::span<const double> rewards, double eta,
                                      HedgeSign sign) const {
  if (static_cast<int>(rewards.size()) != size())
    throw ShapeMismatchError("HedgeUpdated: reward vector size mismatch");
  if (eta < 0.0) throw DorisError("HedgeUpdated: eta must be non-negative");
  for (double r : rewards)
    if (!std::isfinite(r)) throw NonFiniteRewardError("HedgeUpdated: non-finite reward");
  const double s = (sign == HedgeSign::kAscent) ? 1.0 : -1.0;
  std::vector<double> lw(log_weights_);
  for (size_t i = 0; i < lw.size(); ++i) lw[i] += s * eta * rewards[i];
  return Hyperpolicy(std::move(lw));
}

int Hyperpolicy::Sample(Rng& rng) const {
  std::vector<double> w = Weights();
  return rng.NextCategorical(w);
}

std::vector<double> JointActionProbs(std::span<const TabularPolicy> agents, int h, int s) {
  size_t total = 1;
  for (const auto& p : agents) total *= static_cast<size_t>(p.n_actions);
  std::vector<double> joint(total, 1.0);
  size_t stride = total;
  for (const auto& p : agents) {
    stride /= static_cast<size_t>(p.n_actions);
    auto row = p.Row(h, s);
    for (size_t j = 0; j < total; ++j) joint[j] *= row[(j / stride) % p.n_actions];
  }
  return joint;
}

TabularPolicy MetaOpponentPolicy(std::span<const TabularPolicy> agents, int skip_agent) {
  if (agents.empty()) throw ShapeMismatchError("MetaOpponentPolicy: no agents");
  std::vector<TabularPolicy> rest;
  for (size_t i = 0; i < agents.size(); ++i)
    if (static_cast<int>(i) != skip_agent) rest.push_back(agents[i]);
  // Product over an empty set: the trivial single-action opponent.
  if (rest.empty())
    return TabularPolicy::Uniform(agents[0].horizon, agents[0].n_states, 1);
  const int horizon = rest[0].horizon;
  const int n_states = rest[0].n_states;
  int n_meta = 1;
  for (const auto& p : rest) {
    if (p.horizon != horizon || p.n_states != n_states)
      throw ShapeMismatchError("MetaOpponentPolicy: incompatible shapes");
    n_meta *= p.n_actions;
  }
  TabularPolicy meta{horizon, n_states, n_meta, {}};
  meta.probs.resize(static_cast<size_t>(horizon) * n_states * n_meta);
  for (int h = 0; h < horizon; ++h)
    for (int s = 0; s < n_states; ++s) {
      auto joint = JointActionProbs(rest, h, s);
      std::copy(joint.begin(), joint.end(),
                meta.probs.begin() + (static_cast<size_t>(h) * n_states + s) * n_meta);
    }
  return meta;
}

PolicyClass MetaOpponentClass(std::span<const PolicyClass> agent_classes, int skip_agent) {
  if (agent_classes.empty()) throw ShapeMismatchError("MetaOpponentClass: no agents");
  std::vector<int> others;
  for (size_t i = 0; i < agent_classes.size(); ++i)
    if (static_cast<int>(i) != skip_agent) others.push_back(static_cast<int>(i));
  if (others.empty()) {
    const TabularPolicy& ref = agent_classes[skip_agent].policies.at(0);
    PolicyClass trivial;
    trivial.policies.push_back(TabularPolicy::Uniform(ref.horizon, ref.n_states, 1));
    return trivial;
  }

  int combos = 1;
  for (int j : others) combos *= agent_classes[j].size();
  PolicyClass meta;
  meta.policies.reserve(combos);
  std::vector<int> ids(others.size(), 0);
  for (int k = 0; k < combos; ++k) {
    int rem = k;
    for (size_t p = others.size(); p-- > 0;) {
      ids[p] = rem % agent_classes[others[p]].size();
      rem /= agent_classes[others[p]].size();
    }
    std::vector<TabularPolicy> pols;
    pols.reserve(others.size());
    for (size_t p = 0; p < others.size(); ++p) pols.push_back(agent_classes[others[p]][ids[p]]);
    meta.policies.push_back(MetaOpponentPolicy(pols, -1));
  }
  return meta;
}

int MetaProfileIndex(std::span<const PolicyClass> agent_classes, std::span<const int> profile,
                     int skip_agent) {
  int index = 0;
  for (size_t i = 0; i < agent_classes.size(); ++i) {
    if (static_cast<int>(i) == skip_agent) continue;
    index = index * agent_classes[i].size() + profile[i];
  }
  return index;
}

std::vector<std::pair<int, double>> MixturePolicy::Marginal(int agent) const {
  std::map<int, double> acc;
  for (int k = 0; k < size(); ++k) acc[profile_ids[k][agent]] += weights[k];
  return {acc.begin(), acc.end()};
}

MixturePolicy UniformMixture(std::vector<std::vector<int>> profiles) {
  MixturePolicy m;
  const double w = 1.0 / static_cast<double>(profiles.size());
  m.weights.assign(profiles.size(), w);
  m.profile_ids = std::move(profiles);
  return m;
}

}  // namespace doris
