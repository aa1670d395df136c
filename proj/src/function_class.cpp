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

#include "doris/function_class.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace doris {

TableShape ShapeOf(const TabularMarkovGame& game) {
  return {game.n_states, game.PlayerActions(), game.OpponentActions()};
}

QFunction QFunction::Zero(int horizon, TableShape shape) {
  QFunction f{horizon, shape, {}};
  f.tables.assign(static_cast<size_t>(horizon) * shape.cells(), 0.0);
  return f;
}

double MarginalizeTable(std::span<const double> table, TableShape shape, const TabularPolicy& mu,
                        const TabularPolicy& nu, int h, int s) {
  if (static_cast<int>(table.size()) != shape.cells())
    throw ShapeMismatchError("MarginalizeTable: wrong table size");
  if (mu.n_actions != shape.n_player_actions || nu.n_actions != shape.n_opponent_actions)
    throw ShapeMismatchError("MarginalizeTable: policy shape mismatch");
  auto mu_row = mu.Row(h, s);
  auto nu_row = nu.Row(h, s);
  double out = 0.0;
  for (int a = 0; a < shape.n_player_actions; ++a) {
    if (mu_row[a] == 0.0) continue;
    double inner = 0.0;
    for (int b = 0; b < shape.n_opponent_actions; ++b)
      inner += nu_row[b] * table[shape.idx(s, a, b)];
    out += mu_row[a] * inner;
  }
  return out;
}

double Marginalize(const QFunction& f, int h, const TabularPolicy& mu, const TabularPolicy& nu,
                   int s) {
  return MarginalizeTable(f.At(h), f.shape, mu, nu, h, s);
}

double EmpiricalLoss(TableShape shape, std::span<const double> xi_h,
                     std::span<const double> zeta_next, const TabularPolicy& mu,
                     const TabularPolicy& nu, std::span<const Episode> data, int h, int channel) {
  double loss = 0.0;
  for (const Episode& ep : data) {
    const EpisodeStep& step = ep.steps[h];
    const int next_state =
        (h + 1 < static_cast<int>(ep.steps.size())) ? ep.steps[h + 1].state : ep.final_state;
    double target = step.rewards[channel];
    if (!zeta_next.empty())
      target += MarginalizeTable(zeta_next, shape, mu, nu, h + 1, next_state);
    double residual = xi_h[shape.idx(step.state, step.action, step.opponent_action)] - target;
    loss += residual * residual;
  }
  return loss;
}

int StepFunctionClass::TotalCount() const {
  int total = 0;
  for (const auto& step : per_step) total += static_cast<int>(step.size());
  return total;
}

namespace {

bool TablesClose(std::span<const double> a, std::span<const double> b, double tol) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

// Returns the id of an existing member within tol, or -1.
int FindMember(const std::vector<QFunction>& members, const QFunction& f, double tol) {
  for (size_t i = 0; i < members.size(); ++i)
    if (TablesClose(members[i].tables, f.tables, tol)) return static_cast<int>(i);
  return -1;
}

int FindStepMember(const std::vector<std::vector<double>>& members, std::span<const double> t,
                   double tol) {
  for (size_t i = 0; i < members.size(); ++i)
    if (TablesClose(members[i], t, tol)) return static_cast<int>(i);
  return -1;
}

QFunction TrueQFunction(const TabularMarkovGame& game, const TabularPolicy& mu,
                        const TabularPolicy& nu, std::span<const double> reward) {
  ValueTables vt = QValues(game, mu, nu, reward);
  QFunction f{game.horizon, ShapeOf(game), std::move(vt.q)};
  return f;
}

}  // namespace

BuiltClasses BuildRealizableClasses(const TabularMarkovGame& game, const PolicyClass& pi,
                                    const PolicyClass& pi_prime, std::span<const double> reward,
                                    const ClassBuildSpec& spec) {
  if (pi.size() == 0 || pi_prime.size() == 0)
    throw DorisError("BuildRealizableClasses: empty policy class");
  const TableShape shape = ShapeOf(game);
  const double v_max = game.VMax();

  BuiltClasses out;
  out.true_q_ids.assign(pi.size(), std::vector<int>(pi_prime.size(), -1));

  // Exact action-value functions of every policy pair, deduplicated.
  for (int m = 0; m < pi.size(); ++m) {
    for (int n = 0; n < pi_prime.size(); ++n) {
      QFunction q = TrueQFunction(game, pi[m], pi_prime[n], reward);
      int id = FindMember(out.f_class.members, q, spec.dedup_tol);
      if (id < 0) {
        id = out.f_class.size();
        out.f_class.members.push_back(std::move(q));
      }
      out.true_q_ids[m][n] = id;
    }
  }

  // Distractors: clipped Gaussian perturbations of the exact members, cycling
  // through them, so confidence-set pruning has something to reject.
  const int n_true = out.f_class.size();
  Rng rng = MakeStream(spec.seed, "class-distractors");
  for (int k = 0; k < spec.distractors; ++k) {
    QFunction f = out.f_class.members[k % n_true];
    for (double& v : f.tables) {
      v += spec.perturb_scale * v_max * rng.NextGaussian();
      v = std::clamp(v, 0.0, v_max);
    }
    if (FindMember(out.f_class.members, f, spec.dedup_tol) < 0)
      out.f_class.members.push_back(std::move(f));
  }

  // G_h: every one-step backup of every member's next-step table under every
  // policy pair, deduplicated per step. The last-step backup ignores f
  // (f_{H+1} = 0), so one pass over the policy pairs covers it.
  out.g_class.horizon = game.horizon;
  out.g_class.shape = shape;
  out.g_class.per_step.resize(game.horizon);
  for (int h = 0; h < game.horizon; ++h) {
    const int f_count = (h + 1 < game.horizon) ? out.f_class.size() : 1;
    for (int fid = 0; fid < f_count; ++fid) {
      const QFunction& f = out.f_class.members[fid];
      std::span<const double> f_next =
          (h + 1 < game.horizon) ? f.At(h + 1) : std::span<const double>{};
      for (int m = 0; m < pi.size(); ++m) {
        for (int n = 0; n < pi_prime.size(); ++n) {
          std::vector<double> backup =
              BellmanBackup(game, pi[m], pi_prime[n], f_next, h, reward);
          if (FindStepMember(out.g_class.per_step[h], backup, spec.dedup_tol) < 0)
            out.g_class.per_step[h].push_back(std::move(backup));
        }
      }
    }
  }
  return out;
}

BuiltClasses BuildRealizableClassesSingle(const TabularMarkovGame& game, const PolicyClass& pi,
                                          std::span<const double> reward,
                                          const ClassBuildSpec& spec) {
  PolicyClass trivial;
  trivial.policies.push_back(TabularPolicy::Uniform(game.horizon, game.n_states, 1));
  return BuildRealizableClasses(game, pi, trivial, reward, spec);
}

int VectorBuiltClasses::MaxUnionSize() const {
  int best = 0;
  for (int j = 0; j < dim; ++j) best = std::max(best, size() + g_per_dim[j].TotalCount());
  return best;
}

VectorBuiltClasses BuildVectorClasses(const VmdpInstance& inst, const PolicyClass& pi,
                                      const ClassBuildSpec& spec) {
  const TabularMarkovGame& mdp = inst.mdp;
  const TabularPolicy trivial = TabularPolicy::Uniform(mdp.horizon, mdp.n_states, 1);
  const TableShape shape = ShapeOf(mdp);
  const double v_max = mdp.VMax();

  VectorBuiltClasses out;
  out.dim = inst.reward_dim;
  out.true_q_ids.assign(pi.size(), -1);

  auto vector_close = [&](const std::vector<QFunction>& a, const std::vector<QFunction>& b) {
    for (int j = 0; j < out.dim; ++j)
      if (!TablesClose(a[j].tables, b[j].tables, spec.dedup_tol)) return false;
    return true;
  };
  auto find_vector = [&](const std::vector<QFunction>& cand) {
    for (size_t i = 0; i < out.members.size(); ++i)
      if (vector_close(out.members[i], cand)) return static_cast<int>(i);
    return -1;
  };

  for (int m = 0; m < pi.size(); ++m) {
    std::vector<QFunction> vec;
    vec.reserve(out.dim);
    for (int j = 0; j < out.dim; ++j)
      vec.push_back(TrueQFunction(mdp, pi[m], trivial, mdp.RewardTable(j)));
    int id = find_vector(vec);
    if (id < 0) {
      id = static_cast<int>(out.members.size());
      out.members.push_back(std::move(vec));
    }
    out.true_q_ids[m] = id;
  }

  const int n_true = static_cast<int>(out.members.size());
  Rng rng = MakeStream(spec.seed, "vector-class-distractors");
  for (int k = 0; k < spec.distractors; ++k) {
    std::vector<QFunction> vec = out.members[k % n_true];
    for (QFunction& component : vec)
      for (double& v : component.tables) {
        v += spec.perturb_scale * v_max * rng.NextGaussian();
        v = std::clamp(v, 0.0, v_max);
      }
    if (find_vector(vec) < 0) out.members.push_back(std::move(vec));
  }

  out.g_per_dim.resize(out.dim);
  for (int j = 0; j < out.dim; ++j) {
    StepFunctionClass& g = out.g_per_dim[j];
    g.horizon = mdp.horizon;
    g.shape = shape;
    g.per_step.resize(mdp.horizon);
    for (int h = 0; h < mdp.horizon; ++h) {
      const int f_count = (h + 1 < mdp.horizon) ? static_cast<int>(out.members.size()) : 1;
      for (int fid = 0; fid < f_count; ++fid) {
        const QFunction& component = out.members[fid][j];
        std::span<const double> f_next =
            (h + 1 < mdp.horizon) ? component.At(h + 1) : std::span<const double>{};
        for (int m = 0; m < pi.size(); ++m) {
          std::vector<double> backup =
              BellmanBackup(mdp, pi[m], trivial, f_next, h, mdp.RewardTable(j));
          if (FindStepMember(g.per_step[h], backup, spec.dedup_tol) < 0)
            g.per_step[h].push_back(std::move(backup));
        }
      }
    }
  }
  return out;
}

std::vector<CertificateFailure> CheckVectorRealizability(const VmdpInstance& inst,
                                                         const PolicyClass& pi,
                                                         const VectorBuiltClasses& classes,
                                                         double tol) {
  const TabularPolicy trivial = TabularPolicy::Uniform(inst.mdp.horizon, inst.mdp.n_states, 1);
  std::vector<CertificateFailure> failures;
  for (int m = 0; m < pi.size(); ++m) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& member : classes.members) {
      double gap = 0.0;
      for (int j = 0; j < classes.dim; ++j) {
        QFunction q = TrueQFunction(inst.mdp, pi[m], trivial, inst.mdp.RewardTable(j));
        for (size_t i = 0; i < q.tables.size(); ++i)
          gap = std::max(gap, std::abs(q.tables[i] - member[j].tables[i]));
      }
      best = std::min(best, gap);
    }
    if (!(best <= tol)) failures.push_back({"realizability", m, -1, -1, -1, best});
  }
  return failures;
}

std::vector<CertificateFailure> CheckVectorCompleteness(const VmdpInstance& inst,
                                                        const PolicyClass& pi,
                                                        const VectorBuiltClasses& classes,
                                                        double tol) {
  const TabularPolicy trivial = TabularPolicy::Uniform(inst.mdp.horizon, inst.mdp.n_states, 1);
  std::vector<CertificateFailure> failures;
  for (int j = 0; j < classes.dim; ++j) {
    for (int h = 0; h < inst.mdp.horizon; ++h) {
      for (int fid = 0; fid < classes.size(); ++fid) {
        const QFunction& component = classes.members[fid][j];
        std::span<const double> f_next =
            (h + 1 < inst.mdp.horizon) ? component.At(h + 1) : std::span<const double>{};
        for (int m = 0; m < pi.size(); ++m) {
          std::vector<double> backup =
              BellmanBackup(inst.mdp, pi[m], trivial, f_next, h, inst.mdp.RewardTable(j));
          double best = std::numeric_limits<double>::infinity();
          for (const auto& g : classes.g_per_dim[j].per_step[h]) {
            double gap = 0.0;
            for (size_t i = 0; i < backup.size(); ++i)
              gap = std::max(gap, std::abs(backup[i] - g[i]));
            best = std::min(best, gap);
          }
          if (!(best <= tol)) failures.push_back({"completeness", m, j, fid, h, best});
        }
      }
    }
  }
  return failures;
}

std::string CertificateFailure::ToString() const {
  std::ostringstream out;
  out << kind << " failure";
  if (mu_id >= 0) out << " mu=" << mu_id;
  if (nu_id >= 0) out << " nu=" << nu_id;
  if (f_id >= 0) out << " f=" << f_id;
  if (h >= 0) out << " h=" << h;
  out << " gap=" << gap;
  return out.str();
}

std::vector<CertificateFailure> CheckRealizability(const TabularMarkovGame& game,
                                                   const PolicyClass& pi,
                                                   const PolicyClass& pi_prime,
                                                   std::span<const double> reward,
                                                   const BuiltClasses& classes, double tol) {
  std::vector<CertificateFailure> failures;
  for (int m = 0; m < pi.size(); ++m) {
    for (int n = 0; n < pi_prime.size(); ++n) {
      QFunction q = TrueQFunction(game, pi[m], pi_prime[n], reward);
      double best = std::numeric_limits<double>::infinity();
      for (const QFunction& f : classes.f_class.members) {
        double gap = 0.0;
        for (size_t i = 0; i < q.tables.size(); ++i)
          gap = std::max(gap, std::abs(q.tables[i] - f.tables[i]));
        best = std::min(best, gap);
      }
      if (!(best <= tol)) failures.push_back({"realizability", m, n, -1, -1, best});
    }
  }
  return failures;
}

std::vector<CertificateFailure> CheckCompleteness(const TabularMarkovGame& game,
                                                  const PolicyClass& pi,
                                                  const PolicyClass& pi_prime,
                                                  std::span<const double> reward,
                                                  const BuiltClasses& classes, double tol) {
  std::vector<CertificateFailure> failures;
  for (int h = 0; h < game.horizon; ++h) {
    for (int fid = 0; fid < classes.f_class.size(); ++fid) {
      const QFunction& f = classes.f_class[fid];
      std::span<const double> f_next =
          (h + 1 < game.horizon) ? f.At(h + 1) : std::span<const double>{};
      for (int m = 0; m < pi.size(); ++m) {
        for (int n = 0; n < pi_prime.size(); ++n) {
          std::vector<double> backup =
              BellmanBackup(game, pi[m], pi_prime[n], f_next, h, reward);
          double best = std::numeric_limits<double>::infinity();
          for (const auto& g : classes.g_class.per_step[h]) {
            double gap = 0.0;
            for (size_t i = 0; i < backup.size(); ++i)
              gap = std::max(gap, std::abs(backup[i] - g[i]));
            best = std::min(best, gap);
          }
          if (!(best <= tol)) failures.push_back({"completeness", m, n, fid, h, best});
        }
      }
    }
  }
  return failures;
}

std::vector<CertificateFailure> CheckRange(const BuiltClasses& classes, double v_max) {
  std::vector<CertificateFailure> failures;
  for (int fid = 0; fid < classes.f_class.size(); ++fid)
    for (double v : classes.f_class[fid].tables)
      if (!(v >= 0.0 && v <= v_max)) {
        failures.push_back({"range", -1, -1, fid, -1, v});
        break;
      }
  return failures;
}

std::string ClassesToJson(const BuiltClasses& classes) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["horizon"] = classes.g_class.horizon;
  doc["shape"] = {classes.g_class.shape.n_states, classes.g_class.shape.n_player_actions,
                  classes.g_class.shape.n_opponent_actions};
  nlohmann::json f = nlohmann::json::array();
  for (const QFunction& member : classes.f_class.members) f.push_back(member.tables);
  doc["f"] = f;
  doc["g"] = classes.g_class.per_step;
  doc["true_q_ids"] = classes.true_q_ids;
  return doc.dump(2) + "\n";
}

BuiltClasses ClassesFromJson(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  if (doc.at("schema_version").get<int>() != 1)
    throw ConfigError("classes json: unsupported schema_version");
  BuiltClasses out;
  auto shape_arr = doc.at("shape").get<std::vector<int>>();
  TableShape shape{shape_arr[0], shape_arr[1], shape_arr[2]};
  int horizon = doc.at("horizon").get<int>();
  for (const auto& tables : doc.at("f")) {
    QFunction f{horizon, shape, tables.get<std::vector<double>>()};
    out.f_class.members.push_back(std::move(f));
  }
  out.g_class.horizon = horizon;
  out.g_class.shape = shape;
  out.g_class.per_step = doc.at("g").get<std::vector<std::vector<std::vector<double>>>>();
  out.true_q_ids = doc.at("true_q_ids").get<std::vector<std::vector<int>>>();
  return out;
}

}  // namespace doris
