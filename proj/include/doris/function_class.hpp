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

#ifndef DORIS_FUNCTION_CLASS_HPP_
#define DORIS_FUNCTION_CLASS_HPP_

#include <span>
#include <string>
#include <vector>

#include "doris/dp.hpp"
#include "doris/game.hpp"
#include "doris/policy.hpp"

namespace doris {

// Shape of one per-step value table in the two-player view. Single-agent
// tables use n_opponent_actions = 1.
struct TableShape {
  int n_states = 0;
  int n_player_actions = 0;
  int n_opponent_actions = 1;

  int cells() const { return n_states * n_player_actions * n_opponent_actions; }
  int idx(int s, int a, int b) const {
    return (s * n_player_actions + a) * n_opponent_actions + b;
  }
  bool operator==(const TableShape&) const = default;
};

TableShape ShapeOf(const TabularMarkovGame& game);

// A candidate action-value function: one [s][a][b] table per step, entries
// in [0, v_max]. The step-(H+1) table is identically zero by convention and
// not stored.
struct QFunction {
  int horizon = 0;
  TableShape shape;
  std::vector<double> tables;  // [h][s][a][b]

  std::span<const double> At(int h) const {
    return {tables.data() + static_cast<size_t>(h) * shape.cells(),
            static_cast<size_t>(shape.cells())};
  }
  std::span<double> MutableAt(int h) {
    return {tables.data() + static_cast<size_t>(h) * shape.cells(),
            static_cast<size_t>(shape.cells())};
  }
  double Value(int h, int s, int a, int b) const {
    return tables[static_cast<size_t>(h) * shape.cells() + shape.idx(s, a, b)];
  }

  static QFunction Zero(int horizon, TableShape shape);
};

// E_{a~mu(.|s), b~nu(.|s)} table(s, a, b) for one step table.
double MarginalizeTable(std::span<const double> table, TableShape shape, const TabularPolicy& mu,
                        const TabularPolicy& nu, int h, int s);
double Marginalize(const QFunction& f, int h, const TabularPolicy& mu, const TabularPolicy& nu,
                   int s);

// Sum over the episodes in `data` of the squared one-step residual at step h,
//   [xi_h(s_h,a_h,b_h) - x_h - zeta_next(s_{h+1}, mu, nu)]^2,
// where x_h is the observed value of `channel` and zeta_next is marginalized
// under (mu, nu) at step h+1. Pass an empty zeta_next for the terminal zero
// convention. This direct episode loop is the reference definition; the
// evaluation loop uses an algebraically aggregated form (see DatasetIndex)
// and tests compare the two.
double EmpiricalLoss(TableShape shape, std::span<const double> xi_h,
                     std::span<const double> zeta_next, const TabularPolicy& mu,
                     const TabularPolicy& nu, std::span<const Episode> data, int h, int channel);

// An ordered finite set of candidate Q functions; ids are positions.
struct FunctionClass {
  std::vector<QFunction> members;
  int size() const { return static_cast<int>(members.size()); }
  const QFunction& operator[](int id) const { return members[id]; }
};

// The auxiliary class holding one-step backups: an independent finite set of
// step tables for every h. Only step-h members enter the step-h residual
// comparison.
struct StepFunctionClass {
  int horizon = 0;
  TableShape shape;
  std::vector<std::vector<std::vector<double>>> per_step;  // [h][member][cell]

  int CountAt(int h) const { return static_cast<int>(per_step[h].size()); }
  int TotalCount() const;
};

struct ClassBuildSpec {
  int distractors = 4;
  double perturb_scale = 0.25;  // in units of v_max
  uint64_t seed = 0;
  double dedup_tol = 1e-12;
};

// The finite classes fed to the evaluation loop, plus provenance: which
// member of `f_class` equals the exact Q of each (mu, nu) pair. Provenance
// is metrics-only; the learner never sees it.
struct BuiltClasses {
  FunctionClass f_class;
  StepFunctionClass g_class;
  std::vector<std::vector<int>> true_q_ids;  // [mu_id][nu_id]
  // Total distinct member count |F| + sum_h |G_h|; enters the confidence
  // slack formula in place of a covering number (a finite class is its own
  // 0-cover).
  int UnionSize() const { return f_class.size() + g_class.TotalCount(); }
};

// F = {exact Q^{mu x nu} : mu in Pi, nu in Pi'} plus clipped Gaussian
// distractor perturbations; G_h = {one-step backups of every f_{h+1} under
// every (mu, nu)}. Both deduplicated at sup-norm dedup_tol, so realizability
// and generalized completeness hold by construction. The construction reads
// the true model; the learner only ever receives the resulting tables.
BuiltClasses BuildRealizableClasses(const TabularMarkovGame& game, const PolicyClass& pi,
                                    const PolicyClass& pi_prime, std::span<const double> reward,
                                    const ClassBuildSpec& spec);

// Single-agent variant (Pi' collapses to the trivial opponent).
BuiltClasses BuildRealizableClassesSingle(const TabularMarkovGame& game, const PolicyClass& pi,
                                          std::span<const double> reward,
                                          const ClassBuildSpec& spec);

// Vector-valued classes: members are whole d-dimensional functions (the
// argmin tie rule runs over member ids), while the auxiliary backup classes
// are kept per dimension because the residual constraint is per dimension.
struct VectorBuiltClasses {
  int dim = 0;
  std::vector<std::vector<QFunction>> members;  // member -> per-dim component
  std::vector<StepFunctionClass> g_per_dim;
  std::vector<int> true_q_ids;  // mu_id -> member id of the exact vector Q
  int size() const { return static_cast<int>(members.size()); }
  // max over dimensions of |F^j| + sum_h |G^j_h| for the slack formula.
  int MaxUnionSize() const;
};

VectorBuiltClasses BuildVectorClasses(const VmdpInstance& inst, const PolicyClass& pi,
                                      const ClassBuildSpec& spec);

struct CertificateFailure {
  std::string kind;  // "realizability" | "completeness" | "range"
  int mu_id = -1;
  int nu_id = -1;
  int f_id = -1;
  int h = -1;
  double gap = 0.0;
  std::string ToString() const;
};

// Exhaustive check that some member matches Q^{mu x nu} entrywise within tol
// for every pair, and that every one-step backup of every member is within
// tol of some step-h member of G. Empty result means certified.
std::vector<CertificateFailure> CheckRealizability(const TabularMarkovGame& game,
                                                   const PolicyClass& pi,
                                                   const PolicyClass& pi_prime,
                                                   std::span<const double> reward,
                                                   const BuiltClasses& classes,
                                                   double tol = 1e-12);
std::vector<CertificateFailure> CheckCompleteness(const TabularMarkovGame& game,
                                                  const PolicyClass& pi,
                                                  const PolicyClass& pi_prime,
                                                  std::span<const double> reward,
                                                  const BuiltClasses& classes,
                                                  double tol = 1e-12);
// Entry range check: all member entries in [0, v_max].
std::vector<CertificateFailure> CheckRange(const BuiltClasses& classes, double v_max);

// Per-dimension realizability/completeness certificates for the vector case.
std::vector<CertificateFailure> CheckVectorRealizability(const VmdpInstance& inst,
                                                         const PolicyClass& pi,
                                                         const VectorBuiltClasses& classes,
                                                         double tol = 1e-12);
std::vector<CertificateFailure> CheckVectorCompleteness(const VmdpInstance& inst,
                                                        const PolicyClass& pi,
                                                        const VectorBuiltClasses& classes,
                                                        double tol = 1e-12);

// Class dump/load for golden tests (ids and tables only).
std::string ClassesToJson(const BuiltClasses& classes);
BuiltClasses ClassesFromJson(const std::string& text);

}  // namespace doris

#endif  // DORIS_FUNCTION_CLASS_HPP_
