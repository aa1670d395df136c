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

#include "doris/dp.hpp"

#include <algorithm>

namespace doris {

namespace {

TabularPolicy TrivialOpponent(const TabularMarkovGame& game) {
  return TabularPolicy::Uniform(game.horizon, game.n_states, 1);
}

void CheckTwoViewShapes(const TabularMarkovGame& game, const TabularPolicy& mu,
                        const TabularPolicy& nu) {
  if (mu.horizon != game.horizon || mu.n_states != game.n_states ||
      mu.n_actions != game.PlayerActions() || nu.horizon != game.horizon ||
      nu.n_states != game.n_states || nu.n_actions != game.OpponentActions())
    throw ShapeMismatchError("policy does not match the game's two-player view");
}

}  // namespace

ValueTables QValues(const TabularMarkovGame& game, const TabularPolicy& mu,
                    const TabularPolicy& nu, std::span<const double> reward) {
  CheckTwoViewShapes(game, mu, nu);
  const int S = game.n_states;
  const int A = game.PlayerActions();
  const int B = game.OpponentActions();
  const int H = game.horizon;
  ValueTables t;
  t.horizon = H;
  t.n_states = S;
  t.n_player_actions = A;
  t.n_opponent_actions = B;
  t.q.assign(static_cast<size_t>(H) * S * A * B, 0.0);
  t.v.assign(static_cast<size_t>(H) * S, 0.0);

  std::vector<double> v_next(S, 0.0);
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      double v = 0.0;
      for (int a = 0; a < A; ++a) {
        for (int b = 0; b < B; ++b) {
          int j = game.JointIndex(a, b);
          double q = reward[(static_cast<size_t>(h) * S + s) * A * B + j];
          auto dist = game.NextStateDist(h, s, j);
          for (int s2 = 0; s2 < S; ++s2) q += dist[s2] * v_next[s2];
          t.q[((static_cast<size_t>(h) * S + s) * A + a) * B + b] = q;
          v += mu.Prob(h, s, a) * nu.Prob(h, s, b) * q;
        }
      }
      t.v[static_cast<size_t>(h) * S + s] = v;
    }
    for (int s = 0; s < S; ++s) v_next[s] = t.v[static_cast<size_t>(h) * S + s];
  }
  return t;
}

ValueTables QValues(const TabularMarkovGame& game, const TabularPolicy& mu,
                    std::span<const double> reward) {
  return QValues(game, mu, TrivialOpponent(game), reward);
}

double PolicyValue(const TabularMarkovGame& game, const TabularPolicy& mu,
                   const TabularPolicy& nu, std::span<const double> reward) {
  return QValues(game, mu, nu, reward).V(0, game.start_state);
}

double PolicyValue(const TabularMarkovGame& game, const TabularPolicy& mu,
                   std::span<const double> reward) {
  return PolicyValue(game, mu, TrivialOpponent(game), reward);
}

std::vector<double> BellmanBackup(const TabularMarkovGame& game, const TabularPolicy& mu,
                                  const TabularPolicy& nu, std::span<const double> f_next, int h,
                                  std::span<const double> reward) {
  CheckTwoViewShapes(game, mu, nu);
  const int S = game.n_states;
  const int A = game.PlayerActions();
  const int B = game.OpponentActions();
  const size_t cells = static_cast<size_t>(S) * A * B;
  if (!f_next.empty() && f_next.size() != cells)
    throw ShapeMismatchError("BellmanBackup: f_next has wrong shape");

  // Marginalize f_next under (mu, nu) at step h+1 per successor state.
  std::vector<double> f_marginal(S, 0.0);
  if (!f_next.empty() && h + 1 < game.horizon) {
    for (int s2 = 0; s2 < S; ++s2) {
      double m = 0.0;
      for (int a = 0; a < A; ++a)
        for (int b = 0; b < B; ++b)
          m += mu.Prob(h + 1, s2, a) * nu.Prob(h + 1, s2, b) *
               f_next[(static_cast<size_t>(s2) * A + a) * B + b];
      f_marginal[s2] = m;
    }
  }

  std::vector<double> out(cells, 0.0);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a)
      for (int b = 0; b < B; ++b) {
        int j = game.JointIndex(a, b);
        double q = reward[(static_cast<size_t>(h) * S + s) * A * B + j];
        auto dist = game.NextStateDist(h, s, j);
        for (int s2 = 0; s2 < S; ++s2) q += dist[s2] * f_marginal[s2];
        out[(static_cast<size_t>(s) * A + a) * B + b] = q;
      }
  return out;
}

std::vector<double> StateOccupancy(const TabularMarkovGame& game, const TabularPolicy& mu,
                                   const TabularPolicy& nu) {
  CheckTwoViewShapes(game, mu, nu);
  const int S = game.n_states;
  const int A = game.PlayerActions();
  const int B = game.OpponentActions();
  std::vector<double> d(static_cast<size_t>(game.horizon) * S, 0.0);
  d[game.start_state] = 1.0;
  for (int h = 0; h + 1 < game.horizon; ++h) {
    for (int s = 0; s < S; ++s) {
      double mass = d[static_cast<size_t>(h) * S + s];
      if (mass == 0.0) continue;
      for (int a = 0; a < A; ++a)
        for (int b = 0; b < B; ++b) {
          double p = mass * mu.Prob(h, s, a) * nu.Prob(h, s, b);
          if (p == 0.0) continue;
          auto dist = game.NextStateDist(h, s, game.JointIndex(a, b));
          for (int s2 = 0; s2 < S; ++s2)
            d[(static_cast<size_t>(h) + 1) * S + s2] += p * dist[s2];
        }
    }
  }
  return d;
}

std::vector<double> StateActionOccupancy(const TabularMarkovGame& game, const TabularPolicy& mu) {
  if (game.OpponentActions() != 1)
    throw ShapeMismatchError("StateActionOccupancy: single-agent games only");
  auto d_state = StateOccupancy(game, mu, TrivialOpponent(game));
  const int S = game.n_states;
  const int A = game.PlayerActions();
  std::vector<double> d(static_cast<size_t>(game.horizon) * S * A, 0.0);
  for (int h = 0; h < game.horizon; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a)
        d[(static_cast<size_t>(h) * S + s) * A + a] =
            d_state[static_cast<size_t>(h) * S + s] * mu.Prob(h, s, a);
  return d;
}

double ValueMemo::Value(const TabularMarkovGame& game, const PolicyClass& pi, int mu_id,
                        const TabularPolicy& nu, std::span<const double> reward) {
  const std::pair<int, uint64_t> key{mu_id, PolicyContentHash(nu)};
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  double value = PolicyValue(game, pi[mu_id], nu, reward);
  std::lock_guard<std::mutex> lock(mu_);
  cache_.emplace(key, value);
  return value;
}

HindsightResult HindsightBest(const TabularMarkovGame& game, const PolicyClass& pi,
                              std::span<const TabularPolicy> opponent_seq,
                              std::span<const double> reward, ValueMemo* memo) {
  if (pi.size() == 0) throw DorisError("HindsightBest: empty policy class");
  ValueMemo local;
  ValueMemo* m = memo ? memo : &local;
  HindsightResult best{0, -1.0};
  for (int id = 0; id < pi.size(); ++id) {
    double total = 0.0;
    for (const auto& nu : opponent_seq) total += m->Value(game, pi, id, nu, reward);
    if (id == 0 || total > best.total_value) best = {id, total};
  }
  return best;
}

double Regret(const TabularMarkovGame& game, const PolicyClass& pi, std::span<const int> mu_ids,
              std::span<const TabularPolicy> opponent_seq, std::span<const double> reward,
              ValueMemo* memo) {
  if (mu_ids.size() != opponent_seq.size())
    throw ShapeMismatchError("Regret: policy sequences have different lengths");
  ValueMemo local;
  ValueMemo* m = memo ? memo : &local;
  HindsightResult best = HindsightBest(game, pi, opponent_seq, reward, m);
  double realized = 0.0;
  for (size_t t = 0; t < mu_ids.size(); ++t)
    realized += m->Value(game, pi, mu_ids[t], opponent_seq[t], reward);
  return best.total_value - realized;
}

double Violation(const CmdpInstance& inst, const PolicyClass& pi, std::span<const int> mu_ids) {
  double total = 0.0;
  std::vector<double> value_by_id(pi.size(), -1.0);
  for (int id : mu_ids) {
    if (value_by_id[id] < 0.0)
      value_by_id[id] = PolicyValue(inst.mdp, pi[id], inst.mdp.RewardTable(1));
    total += inst.threshold - value_by_id[id];
  }
  return PositivePart(total);
}

std::vector<double> CceGap(const TabularMarkovGame& game,
                           std::span<const PolicyClass> agent_classes, const MixturePolicy& mix) {
  const int n = game.NumAgents();
  if (static_cast<int>(agent_classes.size()) != n)
    throw ShapeMismatchError("CceGap: one policy class per agent required");
  std::vector<double> gaps(n, 0.0);
  for (int i = 0; i < n; ++i) {
    TabularMarkovGame view = ViewForAgent(game, i);
    // Meta-opponent policy per profile (the others' play), plus the agent's
    // own policy for the mixture value.
    double mixture_value = 0.0;
    std::vector<TabularPolicy> others_meta(mix.size());
    for (int k = 0; k < mix.size(); ++k) {
      std::vector<TabularPolicy> all;
      all.reserve(n);
      for (int j = 0; j < n; ++j) all.push_back(agent_classes[j][mix.profile_ids[k][j]]);
      others_meta[k] = MetaOpponentPolicy(all, i);
      mixture_value +=
          mix.weights[k] *
          PolicyValue(view, agent_classes[i][mix.profile_ids[k][i]], others_meta[k],
                      view.RewardTable(0));
    }
    double best_deviation = 0.0;
    for (int id = 0; id < agent_classes[i].size(); ++id) {
      double value = 0.0;
      for (int k = 0; k < mix.size(); ++k)
        value += mix.weights[k] *
                 PolicyValue(view, agent_classes[i][id], others_meta[k], view.RewardTable(0));
      if (id == 0 || value > best_deviation) best_deviation = value;
    }
    gaps[i] = best_deviation - mixture_value;
  }
  return gaps;
}

std::array<double, 4> RegretDecomposition(double v_best_true, double vbar_best, double vbar_mean,
                                          double vbar_played, double v_played_true) {
  return {v_best_true - vbar_best, vbar_best - vbar_mean, vbar_mean - vbar_played,
          vbar_played - v_played_true};
}

}  // namespace doris
