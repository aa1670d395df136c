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

#ifndef DORIS_APPROACHABILITY_HPP_
#define DORIS_APPROACHABILITY_HPP_

#include <vector>

#include "doris/agents.hpp"
#include "doris/game.hpp"

// Steering the expected reward vector of a vector-valued MDP into a convex
// target set. The distance objective dualizes over unit directions theta; a
// Hedge player descends on the directed pessimistic estimates while theta
// follows projected gradient ascent toward the separating direction.

namespace doris {

// Vertex of C maximizing <theta, x>; ties go to the lowest vertex index.
int SupportArgmax(const TargetSet& target, std::span<const double> theta);
double SupportValue(const TargetSet& target, std::span<const double> theta);

struct ProjectionResult {
  double distance = 0.0;
  std::vector<double> point;  // nearest point of conv(vertices)
  int iterations = 0;
};

// Euclidean distance from x to the convex hull of the target vertices via
// the min-norm-point iteration over active vertex sets, certified by the
// support gap max_v <p - x, p - v> <= wolfe_tol at exit. Throws
// ConvergenceFailureError past max_iterations (degenerate geometry).
ProjectionResult DistToSet(std::span<const double> x, const TargetSet& target,
                           double wolfe_tol = 1e-10, int max_iterations = 100000);

struct VmdpConfig : DorisConfig {
  double alpha_scale = -1.0;  // alpha_t = alpha_scale / sqrt(t); negative derives 2/(H sqrt(d))
};

struct VmdpRecord {
  int t = 0;
  int mu_id = 0;
  std::vector<double> theta;           // direction used in this episode
  std::vector<double> vunder_played;   // pessimistic vector of the sampled policy
  double distance_to_date = 0.0;       // distance of the running average exact vector
  double pessimism_frac = 0.0;         // fraction of policies whose exact Q stayed in the set
};

struct VmdpResult {
  std::vector<VmdpRecord> records;
  std::vector<int> mu_sequence;        // the uniform output mixture's support
  std::vector<double> mixture_vector;  // (1/K) sum of exact per-episode vectors
  double final_distance = 0.0;
  double best_single_distance = 0.0;   // min over members of Pi, brute-forced
  bool theta_in_ball = true;           // |theta_t| <= 1 after every update
  double eta = 0.0;
  double beta = 0.0;
};

VmdpResult RunApproachability(const VmdpInstance& inst, const PolicyClass& pi,
                              const VectorBuiltClasses& classes, const VmdpConfig& cfg);

}  // namespace doris

#endif  // DORIS_APPROACHABILITY_HPP_
