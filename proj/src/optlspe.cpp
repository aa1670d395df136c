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

#include "doris/optlspe.hpp"

#include <algorithm>
#include <limits>

namespace doris {

DatasetIndex::DatasetIndex(TableShape shape, int horizon, int n_channels)
    : shape_(shape), horizon_(horizon), n_channels_(n_channels) {
  const size_t per_h = static_cast<size_t>(shape.cells()) * shape.n_states;
  count_.assign(static_cast<size_t>(horizon) * per_h, 0.0);
  sum_x_.assign(static_cast<size_t>(horizon) * n_channels * per_h, 0.0);
  sum_x2_.assign(static_cast<size_t>(horizon) * n_channels * per_h, 0.0);
  count_by_cell_.assign(static_cast<size_t>(horizon) * shape.cells(), 0.0);
}

void DatasetIndex::Append(const Episode& episode) {
  if (static_cast<int>(episode.steps.size()) != horizon_)
    throw ShapeMismatchError("DatasetIndex::Append: episode length mismatch");
  for (int h = 0; h < horizon_; ++h) {
    const EpisodeStep& step = episode.steps[h];
    const int next_state =
        (h + 1 < horizon_) ? episode.steps[h + 1].state : episode.final_state;
    const int cell = shape_.idx(step.state, step.action, step.opponent_action);
    count_[CellBase(h, cell) + next_state] += 1.0;
    count_by_cell_[static_cast<size_t>(h) * shape_.cells() + cell] += 1.0;
    for (int c = 0; c < n_channels_; ++c) {
      const double x = step.rewards[c];
      sum_x_[ChanBase(h, c, cell) + next_state] += x;
      sum_x2_[ChanBase(h, c, cell) + next_state] += x * x;
    }
  }
  ++n_episodes_;
}

double DatasetIndex::ResidualTarget::Loss(std::span<const double> xi) const {
  double loss = constant;
  for (size_t c = 0; c < xi.size(); ++c)
    loss += xi[c] * (count_by_cell[c] * xi[c] - 2.0 * target_by_cell[c]);
  return loss;
}

DatasetIndex::ResidualTarget DatasetIndex::PrepareTarget(
    int h, int channel, std::span<const double> zeta_marginal) const {
  ResidualTarget target;
  target.count_by_cell = CountsByCell(h);
  target.target_by_cell.assign(shape_.cells(), 0.0);
  const int S = shape_.n_states;
  double constant = 0.0;
  for (int cell = 0; cell < shape_.cells(); ++cell) {
    const size_t cbase = CellBase(h, cell);
    const size_t xbase = ChanBase(h, channel, cell);
    double b = 0.0;
    for (int s2 = 0; s2 < S; ++s2) {
      const double n = count_[cbase + s2];
      if (n == 0.0) continue;
      const double sx = sum_x_[xbase + s2];
      const double z = zeta_marginal.empty() ? 0.0 : zeta_marginal[s2];
      b += sx + n * z;
      constant += sum_x2_[xbase + s2] + z * (2.0 * sx + n * z);
    }
    target.target_by_cell[cell] = b;
  }
  target.constant = constant;
  return target;
}

std::span<const double> DatasetIndex::CountsByCell(int h) const {
  return {count_by_cell_.data() + static_cast<size_t>(h) * shape_.cells(),
          static_cast<size_t>(shape_.cells())};
}

std::vector<double> NextStepMarginal(const QFunction& f, int h, const TabularPolicy& mu,
                                     const TabularPolicy& nu) {
  std::vector<double> out;
  if (h + 1 >= f.horizon) return out;  // terminal zero convention
  out.resize(f.shape.n_states);
  for (int s = 0; s < f.shape.n_states; ++s) out[s] = Marginalize(f, h + 1, mu, nu, s);
  return out;
}

std::vector<double> RequiredSlack(const FunctionClass& f_class,
                                  const StepFunctionClass& g_class, const DatasetIndex& data,
                                  const TabularPolicy& mu, const TabularPolicy& nu, int channel) {
  std::vector<double> slack(f_class.size(), -std::numeric_limits<double>::infinity());
  for (int id = 0; id < f_class.size(); ++id) {
    const QFunction& f = f_class[id];
    for (int h = 0; h < f.horizon; ++h) {
      std::vector<double> zeta = NextStepMarginal(f, h, mu, nu);
      DatasetIndex::ResidualTarget target = data.PrepareTarget(h, channel, zeta);
      const double f_loss = target.Loss(f.At(h));
      double inf_loss = std::numeric_limits<double>::infinity();
      for (const auto& g : g_class.per_step[h])
        inf_loss = std::min(inf_loss, target.Loss(g));
      slack[id] = std::max(slack[id], f_loss - inf_loss);
    }
  }
  return slack;
}

std::vector<int> ConfidenceSet(const FunctionClass& f_class, const StepFunctionClass& g_class,
                               const DatasetIndex& data, const TabularPolicy& mu,
                               const TabularPolicy& nu, double beta, int channel) {
  if (beta < 0.0) throw DorisError("ConfidenceSet: beta must be non-negative");
  if (f_class.size() == 0) throw EmptyConfidenceSetError("ConfidenceSet: empty function class");
  std::vector<double> slack = RequiredSlack(f_class, g_class, data, mu, nu, channel);
  std::vector<int> members;
  for (int id = 0; id < f_class.size(); ++id)
    if (slack[id] <= beta) members.push_back(id);
  if (members.empty())
    throw EmptyConfidenceSetError(
        "confidence set is empty: slack too small for the provided classes");
  return members;
}

OptimisticResult OptimisticValue(const FunctionClass& f_class, const StepFunctionClass& g_class,
                                 const DatasetIndex& data, const TabularPolicy& mu,
                                 const TabularPolicy& nu, double beta, int channel,
                                 int start_state) {
  if (beta < 0.0) throw DorisError("OptimisticValue: beta must be non-negative");
  OptimisticResult result;
  result.required_slack = RequiredSlack(f_class, g_class, data, mu, nu, channel);
  for (int id = 0; id < f_class.size(); ++id)
    if (result.required_slack[id] <= beta) result.member_ids.push_back(id);
  if (result.member_ids.empty())
    throw EmptyConfidenceSetError(
        "confidence set is empty: slack too small for the provided classes");
  result.value = -std::numeric_limits<double>::infinity();
  for (int id : result.member_ids) {
    double v = Marginalize(f_class[id], 0, mu, nu, start_state);
    if (v > result.value) {
      result.value = v;
      result.witness_id = id;
    }
  }
  return result;
}

OptimisticResult OptimisticValueSingle(const FunctionClass& f_class,
                                       const StepFunctionClass& g_class,
                                       const DatasetIndex& data, const TabularPolicy& mu,
                                       double beta, int channel, int start_state) {
  TabularPolicy trivial = TabularPolicy::Uniform(mu.horizon, mu.n_states, 1);
  return OptimisticValue(f_class, g_class, data, mu, trivial, beta, channel, start_state);
}

PessimisticVectorResult PessimisticVectorValue(const VectorBuiltClasses& classes,
                                               const DatasetIndex& data, const TabularPolicy& mu,
                                               double beta, std::span<const double> theta,
                                               int start_state) {
  if (beta < 0.0) throw DorisError("PessimisticVectorValue: beta must be non-negative");
  if (static_cast<int>(theta.size()) != classes.dim)
    throw ShapeMismatchError("PessimisticVectorValue: theta dimension mismatch");
  if (Norm(theta) > 1.0 + 1e-9)
    throw DorisError("PessimisticVectorValue: theta outside the unit ball");
  TabularPolicy trivial = TabularPolicy::Uniform(mu.horizon, mu.n_states, 1);

  PessimisticVectorResult result;
  for (int id = 0; id < classes.size(); ++id) {
    bool ok = true;
    for (int j = 0; j < classes.dim && ok; ++j) {
      const QFunction& component = classes.members[id][j];
      for (int h = 0; h < component.horizon && ok; ++h) {
        std::vector<double> zeta = NextStepMarginal(component, h, mu, trivial);
        DatasetIndex::ResidualTarget target = data.PrepareTarget(h, j, zeta);
        const double f_loss = target.Loss(component.At(h));
        double inf_loss = std::numeric_limits<double>::infinity();
        for (const auto& g : classes.g_per_dim[j].per_step[h])
          inf_loss = std::min(inf_loss, target.Loss(g));
        ok = f_loss <= inf_loss + beta;
      }
    }
    if (ok) result.member_ids.push_back(id);
  }
  if (result.member_ids.empty())
    throw EmptyConfidenceSetError(
        "vector confidence set is empty: slack too small for the provided classes");

  double best = std::numeric_limits<double>::infinity();
  for (int id : result.member_ids) {
    double inner = 0.0;
    std::vector<double> vec(classes.dim);
    for (int j = 0; j < classes.dim; ++j) {
      vec[j] = Marginalize(classes.members[id][j], 0, mu, trivial, start_state);
      inner += theta[j] * vec[j];
    }
    if (inner < best) {
      best = inner;
      result.witness_id = id;
      result.value = std::move(vec);
    }
  }
  return result;
}

}  // namespace doris
