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

#ifndef DORIS_HARNESS_HPP_
#define DORIS_HARNESS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "doris/approachability.hpp"
#include "doris/constrained.hpp"

// Experiment configuration, seeding, run orchestration, and metrics
// emission. A run writes one CSV per seed (header row, RFC 4180 quoting,
// floats at 17 significant digits) plus a summary JSON whose every number is
// recomputable from the CSVs. (config, master seed) -> byte-identical
// artifacts, independent of the thread count.

namespace doris {

struct ExperimentConfig {
  std::string mode;  // decentralized | selfplay | cmdp | vmdp
  int episodes = 100;
  uint64_t seed = 1;
  int seed_count = 1;
  double delta = 0.05;
  double c = 1.0;
  // Negative means "derive from the schedule formula".
  double eta = -1.0;
  double beta = -1.0;
  double alpha = -1.0;
  double chi = -1.0;
  double alpha_scale = -1.0;
  int threads = 1;
  std::string out_dir = "out";
  std::string config_dir;  // directory of the config file, for relative paths
  std::string raw;         // the full config document
};

ExperimentConfig LoadExperimentConfig(const std::string& path);
ExperimentConfig ParseExperimentConfig(const std::string& json_text,
                                       const std::string& config_dir = "");

// CLI-style override: key in {episodes, seed, seeds, delta, c, eta, beta,
// alpha, chi, alpha_scale, threads, out}.
void ApplyOverride(ExperimentConfig& cfg, const std::string& key, const std::string& value);

struct ParamReport {
  std::string name;
  double value = 0.0;
  std::string formula;  // the schedule it came from, with substituted values
};

struct CheckReport {
  bool ok = true;
  std::vector<std::string> failures;
  std::vector<ParamReport> params;
  std::string text;  // the rendered report
  std::string json;
};

// Validates the instance, certifies the built classes (realizability,
// completeness, range), verifies the Slater witness when declared, and
// prints every effective parameter with the formula it was derived from.
CheckReport CheckExperiment(const ExperimentConfig& cfg);

struct RunArtifacts {
  std::vector<std::string> csv_paths;
  std::string summary_path;
};

// Executes the configured sweep (master seeds seed, seed+1, ...) and writes
// the artifacts under out_dir.
RunArtifacts RunExperiment(const ExperimentConfig& cfg);

// Materializes the configured instance as a standalone JSON document.
std::string GenerateInstanceJson(const ExperimentConfig& cfg);

// --- Named example instances ----------------------------------------------

// Two-state chain where action 0 pays reward and action 1 pays utility, with
// deterministic toggling transitions. The reward-greedy policy violates any
// threshold above zero while action-mix policies trade the two channels off
// linearly.
CmdpInstance MakeActionTradeoffCmdp(int horizon, double threshold);

// Same dynamics with a two-dimensional reward (one channel per action) and a
// segment target on the anti-diagonal that no pure-ish mix in the policy
// class reaches but a mixture does.
VmdpInstance MakeSegmentTradeoffVmdp(int horizon, double center_low, double center_high);

// --- Shared quantile conventions -------------------------------------------

// Linear interpolation at rank q * (n - 1) over the sorted values; the
// summary's medians and quartiles all use this.
double Quantile(std::vector<double> values, double q);

}  // namespace doris

#endif  // DORIS_HARNESS_HPP_
