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

#include "doris/approachability.hpp"

#include <algorithm>
#include <cmath>

#include "doris/optlspe.hpp"

namespace doris {

int SupportArgmax(const TargetSet& target, std::span<const double> theta) {
  if (target.vertices.empty()) throw DorisError("SupportArgmax: empty target set");
  int best = 0;
  double best_value = Dot(target.vertices[0], theta);
  for (size_t i = 1; i < target.vertices.size(); ++i) {
    double v = Dot(target.vertices[i], theta);
    if (v > best_value) {
      best_value = v;
      best = static_cast<int>(i);
    }
  }
  return best;
}

double SupportValue(const TargetSet& target, std::span<const double> theta) {
  return Dot(target.vertices[SupportArgmax(target, theta)], theta);
}

namespace {

// Solves min |sum_i alpha_i y_i|^2 subject to sum_i alpha_i = 1 over the
// current active set via the KKT system [G 1; 1^T 0][alpha; nu] = [0; 1]
// with partial pivoting. Returns false when the system is numerically
// singular (affinely dependent active set).
bool AffineMinNorm(const std::vector<std::vector<double>>& ys, std::vector<double>& alpha) {
  const int m = static_cast<int>(ys.size());
  const int n = m + 1;
  std::vector<double> mat(static_cast<size_t>(n) * (n + 1), 0.0);
  auto at = [&](int r, int c) -> double& { return mat[static_cast<size_t>(r) * (n + 1) + c]; };
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) at(i, j) = Dot(ys[i], ys[j]);
    at(i, m) = 1.0;
    at(i, n) = 0.0;
    at(m, i) = 1.0;
  }
  at(m, m) = 0.0;
  at(m, n) = 1.0;

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(at(r, col)) > std::abs(at(pivot, col))) pivot = r;
    if (std::abs(at(pivot, col)) < 1e-13) return false;
    if (pivot != col)
      for (int c = 0; c <= n; ++c) std::swap(at(pivot, c), at(col, c));
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double factor = at(r, col) / at(col, col);
      if (factor == 0.0) continue;
      for (int c = col; c <= n; ++c) at(r, c) -= factor * at(col, c);
    }
  }
  alpha.resize(m);
  for (int i = 0; i < m; ++i) alpha[i] = at(i, n) / at(i, i);
  return true;
}

}  // namespace

ProjectionResult DistToSet(std::span<const double> x, const TargetSet& target, double wolfe_tol,
                           int max_iterations) {
  if (target.vertices.empty()) throw DorisError("DistToSet: empty target set");
  const int d = target.dim();
  if (static_cast<int>(x.size()) != d) throw ShapeMismatchError("DistToSet: dimension mismatch");

  // Work on the shifted vertices y_i = v_i - x; the answer is the min-norm
  // point of their hull.
  std::vector<std::vector<double>> ys(target.vertices.size(), std::vector<double>(d));
  for (size_t i = 0; i < ys.size(); ++i)
    for (int j = 0; j < d; ++j) ys[i][j] = target.vertices[i][j] - x[j];

  // Active set starts at the min-norm vertex.
  int start = 0;
  double best_norm = SquaredNorm(ys[0]);
  for (size_t i = 1; i < ys.size(); ++i) {
    double n = SquaredNorm(ys[i]);
    if (n < best_norm) {
      best_norm = n;
      start = static_cast<int>(i);
    }
  }
  std::vector<int> active{start};
  std::vector<double> weights{1.0};
  std::vector<double> point = ys[start];

  ProjectionResult result;
  for (int iter = 0; iter < max_iterations; ++iter) {
    result.iterations = iter + 1;

    // Support step: the most violating vertex of the optimality condition
    // <p, p - y> <= 0 for all vertices y.
    double pp = SquaredNorm(point);
    int incoming = 0;
    double min_inner = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < ys.size(); ++i) {
      double inner = Dot(point, ys[i]);
      if (inner < min_inner) {
        min_inner = inner;
        incoming = static_cast<int>(i);
      }
    }
    if (pp - min_inner <= wolfe_tol) {
      result.distance = std::sqrt(pp);
      result.point.resize(d);
      for (int j = 0; j < d; ++j) result.point[j] = point[j] + x[j];
      return result;
    }
    if (std::find(active.begin(), active.end(), incoming) == active.end()) {
      active.push_back(incoming);
      weights.push_back(0.0);
    }

    // Minor cycle: drop vertices until the affine minimizer of the active
    // hull has non-negative weights.
    while (true) {
      std::vector<std::vector<double>> sub(active.size());
      for (size_t i = 0; i < active.size(); ++i) sub[i] = ys[active[i]];
      std::vector<double> alpha;
      if (!AffineMinNorm(sub, alpha)) {
        // Degenerate active set: drop the smallest-weight member and retry.
        size_t drop = 0;
        for (size_t i = 1; i < weights.size(); ++i)
          if (weights[i] < weights[drop]) drop = i;
        active.erase(active.begin() + drop);
        weights.erase(weights.begin() + drop);
        if (active.empty()) throw ConvergenceFailureError("DistToSet: active set collapsed");
        continue;
      }
      bool interior = true;
      for (double a : alpha)
        if (a <= 0.0) interior = false;
      if (interior) {
        weights = alpha;
        break;
      }
      // Step toward alpha until the first weight hits zero, then remove it.
      double step = 1.0;
      for (size_t i = 0; i < alpha.size(); ++i)
        if (alpha[i] <= 0.0) step = std::min(step, weights[i] / (weights[i] - alpha[i]));
      for (size_t i = 0; i < alpha.size(); ++i)
        weights[i] = (1.0 - step) * weights[i] + step * alpha[i];
      for (size_t i = weights.size(); i-- > 0;) {
        if (weights[i] <= 1e-12) {
          active.erase(active.begin() + i);
          weights.erase(weights.begin() + i);
        }
      }
      if (active.empty()) throw ConvergenceFailureError("DistToSet: active set collapsed");
      double total = 0.0;
      for (double w : weights) total += w;
      for (double& w : weights) w /= total;
    }

    point.assign(d, 0.0);
    for (size_t i = 0; i < active.size(); ++i)
      for (int j = 0; j < d; ++j) point[j] += weights[i] * ys[active[i]][j];
  }
  throw ConvergenceFailureError("DistToSet: iteration cap reached");
}

VmdpResult RunApproachability(const VmdpInstance& inst, const PolicyClass& pi,
                              const VectorBuiltClasses& classes, const VmdpConfig& cfg) {
  const TabularMarkovGame& mdp = inst.mdp;
  const int d = inst.reward_dim;
  if (mdp.NumAgents() != 1 || mdp.NumChannels() != d)
    throw ShapeMismatchError("RunApproachability: channels must match the reward dimension");
  const double horizon = mdp.VMax();

  const double eta =
      cfg.eta >= 0.0
          ? cfg.eta
          : std::sqrt(std::log(static_cast<double>(std::max(pi.size(), 2))) /
                      (cfg.episodes * horizon * horizon * d));
  const double beta = cfg.beta >= 0.0
                          ? cfg.beta
                          : SlackBeta(cfg.c, horizon, classes.MaxUnionSize(), cfg.episodes,
                                      mdp.horizon, static_cast<double>(pi.size()) * d,
                                      cfg.delta);
  const double alpha_scale =
      cfg.alpha_scale >= 0.0 ? cfg.alpha_scale : 2.0 / (horizon * std::sqrt(double(d)));

  Rng hyper_rng = MakeStream(cfg.seed, "hyper");
  Rng env_rng = MakeStream(cfg.seed, "env");

  Hyperpolicy hyper(pi.size());
  DatasetIndex data(ShapeOf(mdp), mdp.horizon, d);
  const TabularPolicy trivial = TabularPolicy::Uniform(mdp.horizon, mdp.n_states, 1);

  // Exact per-policy vectors for metrics and the brute-forced baseline.
  std::vector<std::vector<double>> true_vec_by_id(pi.size(), std::vector<double>(d));
  for (int id = 0; id < pi.size(); ++id)
    for (int j = 0; j < d; ++j)
      true_vec_by_id[id][j] = PolicyValue(mdp, pi[id], mdp.RewardTable(j));

  VmdpResult result;
  result.eta = eta;
  result.beta = beta;
  result.best_single_distance = std::numeric_limits<double>::infinity();
  for (int id = 0; id < pi.size(); ++id)
    result.best_single_distance =
        std::min(result.best_single_distance, DistToSet(true_vec_by_id[id], inst.target).distance);

  std::vector<double> theta(d, 0.0);
  std::vector<double> running_sum(d, 0.0);

  for (int t = 1; t <= cfg.episodes; ++t) {
    const int mu_id = hyper.Sample(hyper_rng);
    Episode episode = SampleEpisode(mdp, pi[mu_id], trivial, env_rng);

    // Directed pessimistic estimates for every policy under the current
    // direction, from the data of episodes 1..t-1.
    std::vector<PessimisticVectorResult> evals(pi.size());
    ParallelFor(pi.size(), cfg.threads, [&](int m) {
      evals[m] = PessimisticVectorValue(classes, data, pi[m], beta, theta, mdp.start_state);
    });

    VmdpRecord rec;
    rec.t = t;
    rec.mu_id = mu_id;
    rec.theta = theta;
    rec.vunder_played = evals[mu_id].value;

    for (int m = 0; m < pi.size(); ++m) {
      const auto& ids = evals[m].member_ids;
      if (std::find(ids.begin(), ids.end(), classes.true_q_ids[m]) != ids.end())
        rec.pessimism_frac += 1.0;
    }
    rec.pessimism_frac /= pi.size();

    std::vector<double> hedge_loss(pi.size());
    for (int m = 0; m < pi.size(); ++m) hedge_loss[m] = Dot(evals[m].value, theta);
    hyper = hyper.HedgeUpdated(hedge_loss, eta, HedgeSign::kDescent);
    data.Append(episode);

    // Dual ascent toward the direction separating the pessimistic estimate
    // from the target, projected to the unit ball.
    const double alpha_t = alpha_scale / std::sqrt(static_cast<double>(t));
    const auto& support = inst.target.vertices[SupportArgmax(inst.target, theta)];
    for (int j = 0; j < d; ++j)
      theta[j] += alpha_t * (evals[mu_id].value[j] - support[j]);
    const double norm = Norm(theta);
    if (norm > 1.0)
      for (double& v : theta) v /= norm;
    if (Norm(theta) > 1.0 + 1e-12) result.theta_in_ball = false;

    for (int j = 0; j < d; ++j) running_sum[j] += true_vec_by_id[mu_id][j];
    std::vector<double> average(d);
    for (int j = 0; j < d; ++j) average[j] = running_sum[j] / t;
    rec.distance_to_date = DistToSet(average, inst.target).distance;

    result.mu_sequence.push_back(mu_id);
    result.records.push_back(std::move(rec));
  }

  result.mixture_vector.resize(d);
  for (int j = 0; j < d; ++j)
    result.mixture_vector[j] = running_sum[j] / cfg.episodes;
  result.final_distance = DistToSet(result.mixture_vector, inst.target).distance;
  return result;
}

}  // namespace doris
