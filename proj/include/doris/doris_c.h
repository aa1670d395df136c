/* Copyright 2026 The Doris Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the doris shared library. Experiments are opaque handles
 * created from a JSON config document; every call reports a status code and
 * keeps a per-handle error message. Strings returned through out-parameters
 * are owned by the caller and released with doris_string_free.
 */

#ifndef DORIS_DORIS_C_H_
#define DORIS_DORIS_C_H_

#ifdef __cplusplus
extern "C" {
#endif

typedef enum doris_status {
  DORIS_OK = 0,
  DORIS_ERR_INVALID_ARGUMENT = 1,
  DORIS_ERR_CONFIG = 2,
  DORIS_ERR_IO = 3,
  DORIS_ERR_EMPTY_CONFIDENCE_SET = 4,
  DORIS_ERR_MISSING_SLATER_SLACK = 5,
  DORIS_ERR_CONVERGENCE = 6,
  DORIS_ERR_RUNTIME = 7
} doris_status;

typedef struct doris_experiment doris_experiment;

/* Loads and schema-validates a config file. On failure *out is NULL and the
 * message is available via doris_last_error(). */
doris_status doris_experiment_open(const char* config_path, doris_experiment** out);
doris_status doris_experiment_from_json(const char* json_text, doris_experiment** out);

/* key in {episodes, seed, seeds, delta, c, eta, beta, alpha, chi,
 * alpha_scale, threads, out}; value parsed like the config field. */
doris_status doris_experiment_override(doris_experiment* exp, const char* key,
                                       const char* value);

/* Runs the configured sweep and writes one CSV per seed plus summary.json
 * under the configured output directory. */
doris_status doris_experiment_run(doris_experiment* exp);

/* Certification report as a JSON document (includes a rendered "text"
 * field); *ok is 1 when every certificate passed. */
doris_status doris_experiment_check(doris_experiment* exp, char** report_json, int* ok);

/* Materializes the configured instance as a standalone JSON document. */
doris_status doris_experiment_generate(doris_experiment* exp, char** instance_json);

/* Message of the last failing call on this handle ("" if none). */
const char* doris_experiment_last_error(const doris_experiment* exp);

/* Message of the last failing open/from_json call on this thread. */
const char* doris_last_error(void);

void doris_experiment_close(doris_experiment* exp);
void doris_string_free(char* s);
const char* doris_status_name(doris_status status);
const char* doris_version(void);

#ifdef __cplusplus
}
#endif

#endif /* DORIS_DORIS_C_H_ */
