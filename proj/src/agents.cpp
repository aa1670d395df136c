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

#include "doris/agents.hpp"

#include <algorithm>
#include <cmath>

namespace doris {

double DefaultEta(int pi_size, int episodes, double v_max) {
  if (pi_size < 1 || episodes < 1 || v_max <= 0.0) throw DorisError("DefaultEta: bad arguments");
  if (pi_size == 1) return 0.0;
  return std::sqrt(std::log(static_cast<double>(pi_size)) / (episodes * v_max * v_max));
}

double SlackBeta(double c, double v_max, int union_size, int episodes, int horizon,
                 double multiplicity, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DorisError("SlackBeta: delta outside (0, 1]");
  double inside = static_cast<double>(union_size) * episodes * horizon * multiplicity / delta;
  return c * v_max * v_max * std::log(inside);
}

OpponentModel ParseOpponentModel(const std::string& kind, std::vector<int> schedule,
                                 int fixed_id) {
  OpponentModel model;
  model.schedule = std::move(schedule);
  model.fixed_id = fixed_id;
  if (kind == "schedule") {
    if (model.schedule.empty()) throw ConfigError("opponent schedule is empty");
    model.kind = OpponentModel::Kind::kSchedule;
  } else if (kind == "alternating") {
    model.kind = OpponentModel::Kind::kAlternating;
  } else if (kind == "fixed") {
    model.kind = OpponentModel::Kind::kFixed;
  } else if (kind == "uniform_random") {
    model.kind = OpponentModel::Kind::kUniformRandom;
  } else if (kind == "best_response") {
    model.kind = OpponentModel::Kind::kBestResponse;
  } else {
    throw ConfigError("unknown opponent kind: " + kind);
  }
  return model;
}

HedgeValueLearner::HedgeValueLearner(PolicyClass pi, FunctionClass f_class,
                                     StepFunctionClass g_class, TableShape shape, int horizon,
                                     int n_channels, int channel, int start_state, double eta,
                                     double beta)
    : pi_(std::move(pi)),
      f_class_(std::move(f_class)),
      g_class_(std::move(g_class)),
      channel_(channel),
      start_state_(start_state),
      eta_(eta),
      beta_(beta),
      hyperpolicy_(pi_.size()),
      data_(shape, horizon, n_channels) {
  if (eta_ < 0.0 || beta_ < 0.0) throw DorisError("HedgeValueLearner: eta and beta must be >= 0");
}

HedgeValueLearner::Evaluation HedgeValueLearner::Evaluate(const TabularPolicy& revealed_opponent,
                                                          int threads) const {
  Evaluation out;
  const int n = pi_.size();
  out.values.resize(n);
  out.witnesses.resize(n);
  out.required_slack.resize(n);
  out.member_ids.resize(n);
  // Embarrassingly parallel over own policies; each slot is written once, so
  // the result is independent of the thread count.
  ParallelFor(n, threads, [&](int m) {
    OptimisticResult r = OptimisticValue(f_class_, g_class_, data_, pi_[m], revealed_opponent,
                                         beta_, channel_, start_state_);
    out.values[m] = r.value;
    out.witnesses[m] = r.witness_id;
    out.required_slack[m] = std::move(r.required_slack);
    out.member_ids[m] = std::move(r.member_ids);
  });
  return out;
}

void HedgeValueLearner::HedgeStep(std::span<const double> rewards, HedgeSign sign) {
  hyperpolicy_ = hyperpolicy_.HedgeUpdated(rewards, eta_, sign);
}

namespace {

// Chooses the opponent's policy for the 1-based episode t.
// cumulative_player_value[nu] tracks sum_{k<t} V(mu^k x nu) for the
// best-response rule, which minimizes the player's cumulative value.
int OpponentChoice(const OpponentModel& model, int t, int pi_prime_size,
                   std::span<const double> cumulative_player_value, Rng& rng) {
  switch (model.kind) {
    case OpponentModel::Kind::kSchedule:
      return model.schedule[(t - 1) % model.schedule.size()];
    case OpponentModel::Kind::kAlternating:
      return (t - 1) % pi_prime_size;
    case OpponentModel::Kind::kFixed:
      return model.fixed_id;
    case OpponentModel::Kind::kUniformRandom:
      return rng.NextIndex(pi_prime_size);
    case OpponentModel::Kind::kBestResponse: {
      int best = 0;
      for (int id = 1; id < pi_prime_size; ++id)
        if (cumulative_player_value[id] < cumulative_player_value[best]) best = id;
      return best;
    }
  }
  throw DorisError("OpponentChoice: unreachable");
}

// sum over past visits of the squared model residual of the witness at each
// step, as a multiple of beta. Metrics only: uses the true Bellman operator.
double WitnessResidualRatio(const TabularMarkovGame& game, const TabularPolicy& mu,
                            const TabularPolicy& nu, const QFunction& witness,
                            const DatasetIndex& data, std::span<const double> reward,
                            double beta) {
  double worst = 0.0;
  for (int h = 0; h < game.horizon; ++h) {
    std::span<const double> f_next =
        (h + 1 < game.horizon) ? witness.At(h + 1) : std::span<const double>{};
    std::vector<double> backup = BellmanBackup(game, mu, nu, f_next, h, reward);
    auto counts = data.CountsByCell(h);
    auto f_h = witness.At(h);
    double sum = 0.0;
    for (size_t cell = 0; cell < backup.size(); ++cell) {
      double r = f_h[cell] - backup[cell];
      sum += counts[cell] * r * r;
    }
    if (beta > 0.0) worst = std::max(worst, sum / beta);
  }
  return worst;
}

}  // namespace

DecentralizedResult RunDecentralized(const TabularMarkovGame& game, const PolicyClass& pi,
                                     const PolicyClass& pi_prime, const BuiltClasses& classes,
                                     const OpponentModel& opponent, const DorisConfig& cfg) {
  if (game.NumAgents() != 2)
    throw ShapeMismatchError("RunDecentralized: two-player view required");
  const double v_max = game.VMax();
  const double multiplicity =
      static_cast<double>(pi.size()) * (opponent.IsAdaptive() ? pi_prime.size() : 1);
  const double eta =
      cfg.eta >= 0.0 ? cfg.eta : DefaultEta(pi.size(), cfg.episodes, v_max);
  const double beta =
      cfg.beta >= 0.0 ? cfg.beta
                      : SlackBeta(cfg.c, v_max, classes.UnionSize(), cfg.episodes, game.horizon,
                                  multiplicity, cfg.delta);
  // The same formula at c = 1 converts required slack back into a c value.
  const double unit_beta =
      SlackBeta(1.0, v_max, classes.UnionSize(), cfg.episodes, game.horizon, multiplicity,
                cfg.delta);

  Rng hyper_rng = MakeStream(cfg.seed, "hyper");
  Rng env_rng = MakeStream(cfg.seed, "env");
  Rng opp_rng = MakeStream(cfg.seed, "opponent");

  HedgeValueLearner learner(pi, classes.f_class, classes.g_class, ShapeOf(game), game.horizon,
                            game.NumChannels(), /*channel=*/0, game.start_state, eta, beta);

  ValueMemo memo;
  std::vector<double> cumulative_by_mu(pi.size(), 0.0);
  std::vector<double> cumulative_player_value_by_nu(pi_prime.size(), 0.0);
  double cumulative_played = 0.0;

  DecentralizedResult result;
  result.eta = eta;
  result.beta = beta;
  result.records.reserve(cfg.episodes);
  double optimism_hits = 0.0;

  for (int t = 1; t <= cfg.episodes; ++t) {
    const int mu_id = learner.ChoosePolicy(hyper_rng);
    const int nu_id =
        OpponentChoice(opponent, t, pi_prime.size(), cumulative_player_value_by_nu, opp_rng);
    Episode episode = SampleEpisode(game, pi[mu_id], pi_prime[nu_id], env_rng);

    // The opponent reveals nu^t after the episode; the evaluation therefore
    // pairs nu^t with the data of episodes 1..t-1.
    HedgeValueLearner::Evaluation eval = learner.Evaluate(pi_prime[nu_id], cfg.threads);

    DecentralizedRecord rec;
    rec.t = t;
    rec.mu_id = mu_id;
    rec.nu_id = nu_id;
    rec.vbar = eval.values;
    rec.vbar_mean = Dot(eval.values, learner.hyperpolicy().Weights());

    for (int m = 0; m < pi.size(); ++m) {
      const int true_id = classes.true_q_ids[m][nu_id];
      const double slack = eval.required_slack[m][true_id];
      if (slack <= beta) optimism_hits += 1.0;
      rec.optimism_frac += (slack <= beta) ? 1.0 : 0.0;
      result.calibrated_c = std::max(result.calibrated_c, slack / unit_beta);
    }
    rec.optimism_frac /= pi.size();

    result.witness_residual_ratio = std::max(
        result.witness_residual_ratio,
        WitnessResidualRatio(game, pi[mu_id], pi_prime[nu_id],
                             classes.f_class[eval.witnesses[mu_id]], learner.data(),
                             game.RewardTable(0), beta));

    learner.HedgeStep(eval.values, HedgeSign::kAscent);
    learner.Absorb(episode);

    for (int m = 0; m < pi.size(); ++m)
      cumulative_by_mu[m] += memo.Value(game, pi, m, pi_prime[nu_id], game.RewardTable(0));
    if (opponent.kind == OpponentModel::Kind::kBestResponse)
      for (int id = 0; id < pi_prime.size(); ++id)
        cumulative_player_value_by_nu[id] +=
            memo.Value(game, pi, mu_id, pi_prime[id], game.RewardTable(0));

    rec.true_value = memo.Value(game, pi, mu_id, pi_prime[nu_id], game.RewardTable(0));
    cumulative_played += rec.true_value;
    rec.regret_to_date =
        *std::max_element(cumulative_by_mu.begin(), cumulative_by_mu.end()) - cumulative_played;

    result.mu_sequence.push_back(mu_id);
    result.nu_sequence.push_back(nu_id);
    result.records.push_back(std::move(rec));
  }

  // Hindsight baseline over the whole run (ties to the lowest id), then the
  // per-episode four-way split against it.
  result.hindsight_id = 0;
  for (int m = 1; m < pi.size(); ++m)
    if (cumulative_by_mu[m] > cumulative_by_mu[result.hindsight_id]) result.hindsight_id = m;
  for (DecentralizedRecord& rec : result.records) {
    const double v_best =
        memo.Value(game, pi, result.hindsight_id, pi_prime[rec.nu_id], game.RewardTable(0));
    rec.decomposition =
        RegretDecomposition(v_best, rec.vbar[result.hindsight_id], rec.vbar_mean,
                            rec.vbar[rec.mu_id], rec.true_value);
  }

  result.final_regret = result.records.back().regret_to_date;
  result.final_entropy = learner.hyperpolicy().Entropy();
  result.optimism_frequency =
      optimism_hits / (static_cast<double>(cfg.episodes) * pi.size());
  return result;
}

SelfplayResult RunSelfplay(const TabularMarkovGame& game,
                           std::span<const PolicyClass> agent_classes,
                           std::span<const BuiltClasses> agent_value_classes,
                           const DorisConfig& cfg) {
  const int n = game.NumAgents();
  if (static_cast<int>(agent_classes.size()) != n ||
      static_cast<int>(agent_value_classes.size()) != n)
    throw ShapeMismatchError("RunSelfplay: one policy and value class per agent required");
  const double v_max = game.VMax();

  // Per-agent views of the shared world and the matching value memoization.
  std::vector<TabularMarkovGame> views;
  views.reserve(n);
  for (int i = 0; i < n; ++i) views.push_back(ViewForAgent(game, i));

  SelfplayResult result;
  std::vector<HedgeValueLearner> learners;
  std::vector<Rng> hyper_rngs;
  learners.reserve(n);
  for (int i = 0; i < n; ++i) {
    int meta_count = 1;
    for (int j = 0; j < n; ++j)
      if (j != i) meta_count *= agent_classes[j].size();
    const double eta = cfg.eta >= 0.0 ? cfg.eta : DefaultEta(agent_classes[i].size(),
                                                             cfg.episodes, v_max);
    // All agents are adaptive to each other; the slack multiplicity carries
    // |Pi_i| * |Pi_-i| * n.
    const double multiplicity =
        static_cast<double>(agent_classes[i].size()) * meta_count * n;
    const double beta =
        cfg.beta >= 0.0 ? cfg.beta
                        : SlackBeta(cfg.c, v_max, agent_value_classes[i].UnionSize(),
                                    cfg.episodes, game.horizon, multiplicity, cfg.delta);
    result.etas.push_back(eta);
    result.betas.push_back(beta);
    learners.emplace_back(agent_classes[i], agent_value_classes[i].f_class,
                          agent_value_classes[i].g_class, ShapeOf(views[i]), game.horizon,
                          game.NumChannels(), /*channel=*/0, game.start_state, eta, beta);
    hyper_rngs.push_back(MakeStream(cfg.seed, "hyper:agent" + std::to_string(i)));
  }
  Rng env_rng = MakeStream(cfg.seed, "env");

  std::vector<ValueMemo> memos(n);
  std::vector<std::vector<double>> cumulative_by_mu(n);
  std::vector<double> cumulative_played(n, 0.0);
  for (int i = 0; i < n; ++i) cumulative_by_mu[i].assign(agent_classes[i].size(), 0.0);
  std::vector<std::vector<int>> profiles;

  for (int t = 1; t <= cfg.episodes; ++t) {
    SelfplayRecord rec;
    rec.t = t;
    rec.profile.resize(n);
    std::vector<TabularPolicy> played;
    played.reserve(n);
    for (int i = 0; i < n; ++i) {
      rec.profile[i] = learners[i].ChoosePolicy(hyper_rngs[i]);
      played.push_back(agent_classes[i][rec.profile[i]]);
    }
    // One shared trajectory per episode; every agent sees the same world
    // through its own reward channel.
    Episode episode = SampleEpisode(game, played, env_rng);

    rec.vbar.resize(n);
    rec.true_value.resize(n);
    rec.regret_to_date.resize(n);
    rec.optimism_frac.resize(n);
    for (int i = 0; i < n; ++i) {
      TabularPolicy revealed = MetaOpponentPolicy(played, i);
      HedgeValueLearner::Evaluation eval = learners[i].Evaluate(revealed, cfg.threads);
      const int meta_idx = MetaProfileIndex(agent_classes, rec.profile, i);
      double frac = 0.0;
      for (int m = 0; m < agent_classes[i].size(); ++m) {
        const int true_id = agent_value_classes[i].true_q_ids[m][meta_idx];
        if (eval.required_slack[m][true_id] <= learners[i].beta()) frac += 1.0;
      }
      rec.optimism_frac[i] = frac / agent_classes[i].size();
      rec.vbar[i] = eval.values;
      learners[i].HedgeStep(eval.values, HedgeSign::kAscent);
      learners[i].Absorb(EpisodeViewForAgent(episode, game.agent_action_counts, i));

      for (int m = 0; m < agent_classes[i].size(); ++m)
        cumulative_by_mu[i][m] +=
            memos[i].Value(views[i], agent_classes[i], m, revealed, views[i].RewardTable(0));
      rec.true_value[i] = memos[i].Value(views[i], agent_classes[i], rec.profile[i], revealed,
                                         views[i].RewardTable(0));
      cumulative_played[i] += rec.true_value[i];
      rec.regret_to_date[i] =
          *std::max_element(cumulative_by_mu[i].begin(), cumulative_by_mu[i].end()) -
          cumulative_played[i];
    }
    profiles.push_back(rec.profile);
    result.records.push_back(std::move(rec));
  }

  result.mixture = UniformMixture(std::move(profiles));
  result.cce_gaps = CceGap(game, agent_classes, result.mixture);
  return result;
}

}  // namespace doris
