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

#ifndef DORIS_OPTLSPE_HPP_
#define DORIS_OPTLSPE_HPP_

#include <span>
#include <vector>

#include "doris/function_class.hpp"
#include "doris/game.hpp"
#include "doris/policy.hpp"

// Least-squares policy evaluation with slack: keep every candidate whose
// empirical step-h Bellman residual is within beta of the best achievable
// over the auxiliary class, at every step, then select the optimistic
// (or, for vector targets, directionally pessimistic) member.

namespace doris {

// Sufficient statistics of an episode dataset for squared-residual sums.
// Grouping the samples by (step, cell, next state) makes every loss
// evaluation O(cells * states) instead of O(episodes): with
//   A_c = #visits to cell c, B_c = sum over those visits of
//   (observed value + zeta(next state)), and C the xi-independent terms,
// the episode-loop sum equals  sum_c A_c xi(c)^2 - 2 xi(c) B_c + C  exactly.
class DatasetIndex {
 public:
  DatasetIndex(TableShape shape, int horizon, int n_channels);

  void Append(const Episode& episode);
  int NumEpisodes() const { return n_episodes_; }
  TableShape shape() const { return shape_; }
  int horizon() const { return horizon_; }
  int n_channels() const { return n_channels_; }

  // Prepared per (h, channel, marginalized next-step values); evaluates the
  // residual sum for any step table in O(cells).
  struct ResidualTarget {
    std::span<const double> count_by_cell;
    std::vector<double> target_by_cell;
    double constant = 0.0;
    double Loss(std::span<const double> xi) const;
  };
  // zeta_marginal has one entry per state (empty means the zero function).
  ResidualTarget PrepareTarget(int h, int channel, std::span<const double> zeta_marginal) const;

  // Visit counts per cell at step h (for residual diagnostics).
  std::span<const double> CountsByCell(int h) const;

 private:
  TableShape shape_;
  int horizon_;
  int n_channels_;
  int n_episodes_ = 0;
  // [h][cell][s'] and [h][channel][cell][s']
  std::vector<double> count_;
  std::vector<double> sum_x_;
  std::vector<double> sum_x2_;
  std::vector<double> count_by_cell_;  // [h][cell]

  size_t CellBase(int h, int cell) const {
    return (static_cast<size_t>(h) * shape_.cells() + cell) * shape_.n_states;
  }
  size_t ChanBase(int h, int channel, int cell) const {
    return ((static_cast<size_t>(h) * n_channels_ + channel) * shape_.cells() + cell) *
           shape_.n_states;
  }
};

// Marginalizes f's step-(h+1) table into per-state values (zero past the
// horizon), the zeta argument PrepareTarget expects.
std::vector<double> NextStepMarginal(const QFunction& f, int h, const TabularPolicy& mu,
                                     const TabularPolicy& nu);

// For every member f: the smallest slack that would admit it, i.e.
// max_h [ L(f_h, f_{h+1}) - inf_g L(g_h, f_{h+1}) ]. Membership at slack
// beta is exactly required_slack <= beta, which makes set monotonicity in
// beta immediate and gives the optimism calibration its raw numbers.
std::vector<double> RequiredSlack(const FunctionClass& f_class,
                                  const StepFunctionClass& g_class, const DatasetIndex& data,
                                  const TabularPolicy& mu, const TabularPolicy& nu, int channel);

// Ids (in class order) of every f whose step-h residual is within beta of
// the class optimum at every h. Throws EmptyConfidenceSetError when no
// member qualifies: that always means a mis-specified class or slack and
// must be visible, never silently widened.
std::vector<int> ConfidenceSet(const FunctionClass& f_class, const StepFunctionClass& g_class,
                               const DatasetIndex& data, const TabularPolicy& mu,
                               const TabularPolicy& nu, double beta, int channel);

struct OptimisticResult {
  double value = 0.0;
  int witness_id = -1;               // the maximizing member, for diagnostics
  std::vector<int> member_ids;       // the full confidence set
  std::vector<double> required_slack;  // per member of F
};

// max over the confidence set of f_1(s_1, mu, nu); ties go to the lowest id.
OptimisticResult OptimisticValue(const FunctionClass& f_class, const StepFunctionClass& g_class,
                                 const DatasetIndex& data, const TabularPolicy& mu,
                                 const TabularPolicy& nu, double beta, int channel,
                                 int start_state);

// Single-agent wrapper (trivial opponent), run separately per channel for
// reward and utility datasets.
OptimisticResult OptimisticValueSingle(const FunctionClass& f_class,
                                       const StepFunctionClass& g_class,
                                       const DatasetIndex& data, const TabularPolicy& mu,
                                       double beta, int channel, int start_state);

struct PessimisticVectorResult {
  std::vector<double> value;     // full vector f_1(s_1, mu) of the argmin
  int witness_id = -1;
  std::vector<int> member_ids;
};

// Vector variant: membership requires the per-dimension residual condition
// for every dimension and step; the selected member minimizes
// <f_1(s_1, mu), theta> (ties to the lowest id) and its whole vector is
// returned. Requires |theta| <= 1.
PessimisticVectorResult PessimisticVectorValue(const VectorBuiltClasses& classes,
                                               const DatasetIndex& data, const TabularPolicy& mu,
                                               double beta, std::span<const double> theta,
                                               int start_state);

}  // namespace doris

#endif  // DORIS_OPTLSPE_HPP_
