// Copyright 2026 The sciex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/* C interface to the sciex engine.
 *
 * Every function returns a sciex_status. On failure, sciex_last_error()
 * describes the error for the calling thread until its next call. Strings
 * returned through char** out-parameters are owned by the caller and must be
 * released with sciex_string_free. Handles are immutable after creation and
 * may be shared between threads. */

#ifndef SCIEX_SCIEX_H_
#define SCIEX_SCIEX_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(SCIEX_BUILDING_LIBRARY)
#define SCIEX_API __declspec(dllexport)
#else
#define SCIEX_API __declspec(dllimport)
#endif
#else
#define SCIEX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sciex_status {
  SCIEX_OK = 0,
  SCIEX_INVALID_ARGUMENT = 1,
  SCIEX_IO = 2,
  SCIEX_SCHEMA = 3,
  SCIEX_TYPE = 4,
  SCIEX_PARSE = 5,
  SCIEX_CONFIG = 6,
  SCIEX_GROUP_TOO_SMALL = 7,
  SCIEX_SIZE_TOO_LARGE = 8,
  SCIEX_MISSING_RECORD = 9,
  SCIEX_INTERNAL = 10
} sciex_status;

typedef struct sciex_dataset sciex_dataset;
typedef struct sciex_reward_config sciex_reward_config;

/* Output of a batch command. */
typedef struct sciex_result {
  char* output;   /* JSON lines or a JSON document */
  char* summary;  /* human-readable */
  size_t n_failures;
  char* failures; /* newline-separated, each prefixed with its line number */
} sciex_result;

SCIEX_API const char* sciex_version(void);
SCIEX_API const char* sciex_status_name(sciex_status status);
SCIEX_API const char* sciex_last_error(void);
SCIEX_API void sciex_string_free(char* s);
/* Frees the strings of a result and zeroes it. */
SCIEX_API void sciex_result_clear(sciex_result* result);

/* Datasets. `split` may be NULL when `path` names a file. */
SCIEX_API sciex_status sciex_dataset_load(const char* path, const char* split, sciex_dataset** out);
SCIEX_API sciex_status sciex_dataset_parse(const char* text, size_t len, sciex_dataset** out);
SCIEX_API void sciex_dataset_free(sciex_dataset* dataset);
SCIEX_API sciex_status sciex_dataset_size(const sciex_dataset* dataset, size_t* out);

/* Reward configuration; NULL json gives the defaults. */
SCIEX_API sciex_status sciex_reward_config_create(const char* json, sciex_reward_config** out);
SCIEX_API void sciex_reward_config_free(sciex_reward_config* config);
SCIEX_API sciex_status sciex_reward_config_to_json(const sciex_reward_config* config, char** out);

/* Commands. `mode` is "strict" or "lenient"; `task` for rewards is "ner",
 * "rel" or "end2end"; `tasks` for sft is a comma-separated list of "ner",
 * "re_gold", "re", "e2e", or "all". k == 0 skips Best@K. workers == 0 uses
 * every hardware thread. */
SCIEX_API sciex_status sciex_parse(const sciex_dataset* dataset, const char* completions,
                                   const char* mode, size_t workers, sciex_result* out);
SCIEX_API sciex_status sciex_eval(const sciex_dataset* dataset, const char* parsed, size_t k,
                                  sciex_result* out);
SCIEX_API sciex_status sciex_reward(const sciex_dataset* dataset, const char* parsed,
                                    const sciex_reward_config* config, const char* task,
                                    size_t workers, sciex_result* out);
/* Reads {"epsilon", "beta", "std_floor"} (each optional) over the values
 * already held by the out-parameters. */
SCIEX_API sciex_status sciex_grpo_config_parse(const char* json, double* epsilon, double* beta,
                                               double* std_floor);
SCIEX_API sciex_status sciex_grpo(const char* groups, double epsilon, double beta, double std_floor,
                                  sciex_result* out);
SCIEX_API sciex_status sciex_dataset_stats(const sciex_dataset* dataset, sciex_result* out);
SCIEX_API sciex_status sciex_dataset_sft(const sciex_dataset* dataset, const char* tasks, int mimic,
                                         size_t workers, sciex_result* out);
SCIEX_API sciex_status sciex_dataset_curriculum(const sciex_dataset* dataset, size_t n_buckets,
                                                sciex_result* out);
/* `hardness` holds {"id", "score"} lines, or is NULL. */
SCIEX_API sciex_status sciex_dataset_select(const sciex_dataset* dataset, size_t size,
                                            uint64_t seed, size_t n_buckets, const char* hardness,
                                            sciex_result* out);
SCIEX_API sciex_status sciex_dataset_prompt(const sciex_dataset* dataset, const char* record_id,
                                            const char* task, sciex_result* out);

/* Trainer surface. `requests` is a JSON array of {"record": {...}, "text": str};
 * the output array holds one reward object or {"error": {...}} per request. */
SCIEX_API sciex_status sciex_compute_rewards_batch(const char* requests,
                                                   const sciex_reward_config* config,
                                                   const char* task, size_t workers, char** out);
/* JSON array of reward arrays in, JSON array of advantage arrays out. */
SCIEX_API sciex_status sciex_advantages_batch(const char* groups, double std_floor, char** out);

#ifdef __cplusplus
}
#endif

#endif /* SCIEX_SCIEX_H_ */
