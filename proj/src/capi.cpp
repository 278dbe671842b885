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


#include "sciex/sciex.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "sciex/commands.hpp"
#include "sciex/dataset.hpp"
#include "sciex/error.hpp"
#include "sciex/version.hpp"

struct sciex_dataset {
  std::vector<sciex::ExtractionRecord> records;
};

struct sciex_reward_config {
  sciex::RewardConfig config;
};

namespace {

thread_local std::string g_last_error;

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

sciex_status fail(sciex_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, mapping exceptions to status codes.
template <typename Fn>
sciex_status guard(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return SCIEX_OK;
  } catch (const sciex::Error& e) {
    return fail(static_cast<sciex_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SCIEX_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SCIEX_INTERNAL, e.what());
  } catch (...) {
    return fail(SCIEX_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* name) {
  if (!p) throw sciex::Error(sciex::ErrorCode::kInvalidArgument, std::string(name) + " is NULL");
}

void fill(const sciex::CommandResult& r, sciex_result* out) {
  std::string failures;
  for (const auto& f : r.failures) {
    failures += f;
    failures += '\n';
  }
  sciex_result tmp{nullptr, nullptr, r.failures.size(), nullptr};
  try {
    tmp.output = copy_string(r.output);
    tmp.summary = copy_string(r.summary);
    tmp.failures = copy_string(failures);
  } catch (...) {
    sciex_result_clear(&tmp);
    throw;
  }
  *out = tmp;
}

}  // namespace

extern "C" {

const char* sciex_version(void) { return sciex::kVersion; }

const char* sciex_status_name(sciex_status status) {
  if (status == SCIEX_OK) return "Ok";
  if (status < SCIEX_INVALID_ARGUMENT || status > SCIEX_INTERNAL) return "Unknown";
  return sciex::error_code_name(static_cast<sciex::ErrorCode>(status));
}

const char* sciex_last_error(void) { return g_last_error.c_str(); }

void sciex_string_free(char* s) { std::free(s); }

void sciex_result_clear(sciex_result* result) {
  if (!result) return;
  std::free(result->output);
  std::free(result->summary);
  std::free(result->failures);
  *result = sciex_result{nullptr, nullptr, 0, nullptr};
}

sciex_status sciex_dataset_load(const char* path, const char* split, sciex_dataset** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    auto ds = std::make_unique<sciex_dataset>();
    ds->records = sciex::load_dataset(path, split ? split : "");
    *out = ds.release();
  });
}

sciex_status sciex_dataset_parse(const char* text, size_t len, sciex_dataset** out) {
  return guard([&] {
    require(out, "out");
    if (len) require(text, "text");
    auto ds = std::make_unique<sciex_dataset>();
    ds->records = sciex::parse_dataset(std::string_view(text ? text : "", len));
    *out = ds.release();
  });
}

void sciex_dataset_free(sciex_dataset* dataset) { delete dataset; }

sciex_status sciex_dataset_size(const sciex_dataset* dataset, size_t* out) {
  return guard([&] {
    require(dataset, "dataset");
    require(out, "out");
    *out = dataset->records.size();
  });
}

sciex_status sciex_reward_config_create(const char* json, sciex_reward_config** out) {
  return guard([&] {
    require(out, "out");
    auto cfg = std::make_unique<sciex_reward_config>();
    if (json) cfg->config = sciex::parse_reward_config(json);
    cfg->config.validate();
    *out = cfg.release();
  });
}

void sciex_reward_config_free(sciex_reward_config* config) { delete config; }

sciex_status sciex_reward_config_to_json(const sciex_reward_config* config, char** out) {
  return guard([&] {
    require(config, "config");
    require(out, "out");
    *out = copy_string(sciex::to_json(config->config));
  });
}

sciex_status sciex_parse(const sciex_dataset* dataset, const char* completions, const char* mode,
                         size_t workers, sciex_result* out) {
  return guard([&] {
    require(dataset, "dataset");
    require(completions, "completions");
    require(mode, "mode");
    require(out, "out");
    fill(sciex::run_parse(completions, dataset->records, sciex::parse_mode_from_string(mode),
                          workers),
         out);
  });
}

sciex_status sciex_eval(const sciex_dataset* dataset, const char* parsed, size_t k,
                        sciex_result* out) {
  return guard([&] {
    require(dataset, "dataset");
    require(parsed, "parsed");
    require(out, "out");
    std::optional<std::size_t> at_k;
    if (k) at_k = k;
    fill(sciex::run_eval(parsed, dataset->records, at_k), out);
  });
}

sciex_status sciex_reward(const sciex_dataset* dataset, const char* parsed,
                          const sciex_reward_config* config, const char* task, size_t workers,
                          sciex_result* out) {
  return guard([&] {
    require(dataset, "dataset");
    require(parsed, "parsed");
    require(config, "config");
    require(task, "task");
    require(out, "out");
    fill(sciex::run_reward(parsed, dataset->records, config->config,
                           sciex::reward_task_from_string(task), workers),
         out);
  });
}

sciex_status sciex_grpo_config_parse(const char* json, double* epsilon, double* beta,
                                     double* std_floor) {
  return guard([&] {
    require(json, "json");
    require(epsilon, "epsilon");
    require(beta, "beta");
    require(std_floor, "std_floor");
    const sciex::GrpoConfig cfg = sciex::parse_grpo_config(json, {*epsilon, *beta, *std_floor});
    *epsilon = cfg.epsilon;
    *beta = cfg.beta;
    *std_floor = cfg.std_floor;
  });
}

sciex_status sciex_grpo(const char* groups, double epsilon, double beta, double std_floor,
                        sciex_result* out) {
  return guard([&] {
    require(groups, "groups");
    require(out, "out");
    sciex::GrpoConfig cfg;
    cfg.epsilon = epsilon;
    cfg.beta = beta;
    cfg.std_floor = std_floor;
    fill(sciex::run_grpo(groups, cfg), out);
  });
}

sciex_status sciex_dataset_stats(const sciex_dataset* dataset, sciex_result* out) {
  return guard([&] {
    require(dataset, "dataset");
    require(out, "out");
    fill(sciex::run_dataset_stats(dataset->records), out);
  });
}

sciex_status sciex_dataset_sft(const sciex_dataset* dataset, const char* tasks, int mimic,
                               size_t workers, sciex_result* out) {
  return guard([&] {
    require(dataset, "dataset");
    require(tasks, "tasks");
    require(out, "out");
    fill(sciex::run_dataset_sft(dataset->records, sciex::parse_task_list(tasks), mimic != 0,
                                workers),
         out);
  });
}

sciex_status sciex_dataset_curriculum(const sciex_dataset* dataset, size_t n_buckets,
                                      sciex_result* out) {
  return guard([&] {
    require(dataset, "dataset");
    require(out, "out");
    fill(sciex::run_dataset_curriculum(dataset->records, n_buckets), out);
  });
}

sciex_status sciex_dataset_select(const sciex_dataset* dataset, size_t size, uint64_t seed,
                                  size_t n_buckets, const char* hardness, sciex_result* out) {
  return guard([&] {
    require(dataset, "dataset");
    require(out, "out");
    sciex::SelectionOptions options;
    options.size = size;
    options.seed = seed;
    options.n_buckets = n_buckets;
    if (hardness) options.hardness = sciex::parse_hardness(hardness);
    fill(sciex::run_dataset_select(dataset->records, options), out);
  });
}

sciex_status sciex_dataset_prompt(const sciex_dataset* dataset, const char* record_id,
                                  const char* task, sciex_result* out) {
  return guard([&] {
    require(dataset, "dataset");
    require(record_id, "record_id");
    require(task, "task");
    require(out, "out");
    fill(sciex::run_dataset_prompt(dataset->records, record_id, sciex::task_kind_from_string(task)),
         out);
  });
}

sciex_status sciex_compute_rewards_batch(const char* requests, const sciex_reward_config* config,
                                         const char* task, size_t workers, char** out) {
  return guard([&] {
    require(requests, "requests");
    require(config, "config");
    require(task, "task");
    require(out, "out");
    *out = copy_string(sciex::compute_rewards_batch(requests, config->config,
                                                    sciex::reward_task_from_string(task), workers));
  });
}

sciex_status sciex_advantages_batch(const char* groups, double std_floor, char** out) {
  return guard([&] {
    require(groups, "groups");
    require(out, "out");
    *out = copy_string(sciex::advantages_batch(groups, std_floor));
  });
}

}  // extern "C"
