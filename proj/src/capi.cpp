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

#include "doris/doris_c.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "doris/harness.hpp"

struct doris_experiment {
  doris::ExperimentConfig config;
  std::string last_error;
};

namespace {

thread_local std::string g_open_error;

doris_status ClassifyException(const std::exception& e) {
  if (dynamic_cast<const doris::EmptyConfidenceSetError*>(&e))
    return DORIS_ERR_EMPTY_CONFIDENCE_SET;
  if (dynamic_cast<const doris::MissingSlaterSlackError*>(&e))
    return DORIS_ERR_MISSING_SLATER_SLACK;
  if (dynamic_cast<const doris::ConvergenceFailureError*>(&e)) return DORIS_ERR_CONVERGENCE;
  if (dynamic_cast<const doris::ConfigError*>(&e)) return DORIS_ERR_CONFIG;
  if (dynamic_cast<const doris::DorisError*>(&e)) return DORIS_ERR_RUNTIME;
  return DORIS_ERR_RUNTIME;
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
doris_status Guard(doris_experiment* exp, Fn&& fn) {
  if (exp == nullptr) return DORIS_ERR_INVALID_ARGUMENT;
  try {
    fn();
    exp->last_error.clear();
    return DORIS_OK;
  } catch (const std::exception& e) {
    exp->last_error = e.what();
    return ClassifyException(e);
  } catch (...) {
    exp->last_error = "unknown error";
    return DORIS_ERR_RUNTIME;
  }
}

}  // namespace

extern "C" {

doris_status doris_experiment_open(const char* config_path, doris_experiment** out) {
  if (config_path == nullptr || out == nullptr) return DORIS_ERR_INVALID_ARGUMENT;
  *out = nullptr;
  try {
    auto* exp = new doris_experiment{doris::LoadExperimentConfig(config_path), {}};
    *out = exp;
    g_open_error.clear();
    return DORIS_OK;
  } catch (const std::exception& e) {
    g_open_error = e.what();
    return ClassifyException(e);
  }
}

doris_status doris_experiment_from_json(const char* json_text, doris_experiment** out) {
  if (json_text == nullptr || out == nullptr) return DORIS_ERR_INVALID_ARGUMENT;
  *out = nullptr;
  try {
    auto* exp = new doris_experiment{doris::ParseExperimentConfig(json_text), {}};
    *out = exp;
    g_open_error.clear();
    return DORIS_OK;
  } catch (const std::exception& e) {
    g_open_error = e.what();
    return ClassifyException(e);
  }
}

doris_status doris_experiment_override(doris_experiment* exp, const char* key,
                                       const char* value) {
  if (key == nullptr || value == nullptr) return DORIS_ERR_INVALID_ARGUMENT;
  return Guard(exp, [&] { doris::ApplyOverride(exp->config, key, value); });
}

doris_status doris_experiment_run(doris_experiment* exp) {
  return Guard(exp, [&] { doris::RunExperiment(exp->config); });
}

doris_status doris_experiment_check(doris_experiment* exp, char** report_json, int* ok) {
  if (report_json == nullptr) return DORIS_ERR_INVALID_ARGUMENT;
  return Guard(exp, [&] {
    doris::CheckReport report = doris::CheckExperiment(exp->config);
    *report_json = CopyString(report.json);
    if (ok != nullptr) *ok = report.ok ? 1 : 0;
  });
}

doris_status doris_experiment_generate(doris_experiment* exp, char** instance_json) {
  if (instance_json == nullptr) return DORIS_ERR_INVALID_ARGUMENT;
  return Guard(exp, [&] { *instance_json = CopyString(doris::GenerateInstanceJson(exp->config)); });
}

const char* doris_experiment_last_error(const doris_experiment* exp) {
  return exp == nullptr ? "" : exp->last_error.c_str();
}

const char* doris_last_error(void) { return g_open_error.c_str(); }

void doris_experiment_close(doris_experiment* exp) { delete exp; }

void doris_string_free(char* s) { std::free(s); }

const char* doris_status_name(doris_status status) {
  switch (status) {
    case DORIS_OK:
      return "ok";
    case DORIS_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case DORIS_ERR_CONFIG:
      return "config_error";
    case DORIS_ERR_IO:
      return "io_error";
    case DORIS_ERR_EMPTY_CONFIDENCE_SET:
      return "empty_confidence_set";
    case DORIS_ERR_MISSING_SLATER_SLACK:
      return "missing_slater_slack";
    case DORIS_ERR_CONVERGENCE:
      return "convergence_failure";
    case DORIS_ERR_RUNTIME:
      return "runtime_error";
  }
  return "unknown";
}

const char* doris_version(void) { return "0.1.0"; }

}  // extern "C"
