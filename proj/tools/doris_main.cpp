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

// Experiment CLI over the doris C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "doris/doris_c.h"

namespace {

struct ExperimentCloser {
  void operator()(doris_experiment* exp) const { doris_experiment_close(exp); }
};
using ExperimentHandle = std::unique_ptr<doris_experiment, ExperimentCloser>;

int FailWithJson(doris_status status, const std::string& message) {
  nlohmann::json err;
  err["error"]["status"] = doris_status_name(status);
  err["error"]["message"] = message;
  std::cout << err.dump(2) << std::endl;
  return 1;
}

struct CommonOptions {
  std::string config;
  std::string out;
  std::string seed;
  int seeds = -1;
  int threads = -1;
  std::vector<std::string> overrides;
};

void AddCommonOptions(CLI::App* cmd, CommonOptions& opt, bool with_out_dir) {
  cmd->add_option("--config", opt.config, "experiment config JSON")->required();
  if (with_out_dir) cmd->add_option("--out", opt.out, "output directory");
  cmd->add_option("--seed", opt.seed, "master seed");
  cmd->add_option("--seeds", opt.seeds, "number of sweep seeds");
  cmd->add_option("--threads", opt.threads, "worker threads");
  cmd->add_option("--override", opt.overrides, "key=value config override (repeatable)");
}

int OpenAndConfigure(const CommonOptions& opt, ExperimentHandle& handle) {
  doris_experiment* raw = nullptr;
  doris_status status = doris_experiment_open(opt.config.c_str(), &raw);
  if (status != DORIS_OK) return FailWithJson(status, doris_last_error());
  handle.reset(raw);

  auto apply = [&](const std::string& key, const std::string& value) -> int {
    doris_status s = doris_experiment_override(handle.get(), key.c_str(), value.c_str());
    if (s != DORIS_OK) return FailWithJson(s, doris_experiment_last_error(handle.get()));
    return 0;
  };
  if (!opt.seed.empty() && apply("seed", opt.seed)) return 1;
  if (opt.seeds >= 0 && apply("seeds", std::to_string(opt.seeds))) return 1;
  if (opt.threads >= 0 && apply("threads", std::to_string(opt.threads))) return 1;
  if (!opt.out.empty() && apply("out", opt.out)) return 1;
  for (const std::string& kv : opt.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      return FailWithJson(DORIS_ERR_INVALID_ARGUMENT, "override must be key=value: " + kv);
    if (apply(kv.substr(0, eq), kv.substr(eq + 1))) return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"doris: decentralized no-regret learning experiments"};
  app.require_subcommand(1);

  CommonOptions run_opt, check_opt, gen_opt;
  std::string gen_out;
  bool check_json = false;

  CLI::App* run_cmd = app.add_subcommand("run", "run the configured experiment sweep");
  AddCommonOptions(run_cmd, run_opt, /*with_out_dir=*/true);

  CLI::App* check_cmd =
      app.add_subcommand("check", "certify the instance, classes, and parameters");
  AddCommonOptions(check_cmd, check_opt, /*with_out_dir=*/false);
  check_cmd->add_flag("--json", check_json, "print the raw JSON report");

  CLI::App* gen_cmd = app.add_subcommand("gen", "materialize the configured instance to JSON");
  AddCommonOptions(gen_cmd, gen_opt, /*with_out_dir=*/false);
  gen_cmd->add_option("--out", gen_out, "output file (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) {
    ExperimentHandle handle;
    if (int rc = OpenAndConfigure(run_opt, handle)) return rc;
    doris_status status = doris_experiment_run(handle.get());
    if (status != DORIS_OK)
      return FailWithJson(status, doris_experiment_last_error(handle.get()));
    return 0;
  }

  if (check_cmd->parsed()) {
    ExperimentHandle handle;
    if (int rc = OpenAndConfigure(check_opt, handle)) return rc;
    char* report = nullptr;
    int ok = 0;
    doris_status status = doris_experiment_check(handle.get(), &report, &ok);
    if (status != DORIS_OK)
      return FailWithJson(status, doris_experiment_last_error(handle.get()));
    std::string report_text(report);
    doris_string_free(report);
    if (check_json) {
      std::cout << report_text;
    } else {
      nlohmann::json doc = nlohmann::json::parse(report_text);
      std::cout << doc.value("text", report_text);
    }
    return ok ? 0 : 1;
  }

  if (gen_cmd->parsed()) {
    ExperimentHandle handle;
    if (int rc = OpenAndConfigure(gen_opt, handle)) return rc;
    char* instance = nullptr;
    doris_status status = doris_experiment_generate(handle.get(), &instance);
    if (status != DORIS_OK)
      return FailWithJson(status, doris_experiment_last_error(handle.get()));
    std::string text(instance);
    doris_string_free(instance);
    if (gen_out.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(gen_out, std::ios::binary);
      if (!out) return FailWithJson(DORIS_ERR_IO, "cannot write " + gen_out);
      out << text;
    }
    return 0;
  }
  return 0;
}
