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


// Batch workflows over line-delimited text. Each command is a pure function of
// its inputs; file handling and run manifests live in the command-line tool.
//
// Completions (input of parse), one object per line:
//   {"record_id": str, "sample_index": int, "text": str}
//
// Parsed completions (output of parse, input of eval and reward):
//   {"record_id", "sample_index", "error": str|null,
//    "format": {"has_reasoning", "has_think", "has_answer", "answer_parses",
//               "blocks_in_order", "dropped_items", "strict_ok",
//               "strict_violation"} | null,
//    "reasoning", "think", "answer_raw",
//    "extraction": {"ner": [[surface, type]], "rel": [[s, r, o]]} | null}
//
// GRPO groups (input of grpo), one output per line, grouped by group_id in
// order of first appearance:
//   {"group_id": str, "reward": num, "logp": [num], "logp_old": [num],
//    "logp_ref": [num]}

#ifndef SCIEX_COMMANDS_HPP_
#define SCIEX_COMMANDS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sciex/core_model.hpp"
#include "sciex/grpo.hpp"
#include "sciex/metrics.hpp"
#include "sciex/output_parser.hpp"
#include "sciex/prompts.hpp"
#include "sciex/reward.hpp"
#include "sciex/sampling.hpp"

namespace sciex {

struct CommandResult {
  // Machine-readable output: JSON lines, or a single JSON document.
  std::string output;
  // Human-readable summary.
  std::string summary;
  // Per-line failures, each prefixed with its 1-based input line number.
  std::vector<std::string> failures;
};

// Runs fn(0..n-1) on up to `workers` threads (0 picks the hardware count).
// Results come back in index order; the first exception is rethrown after all
// workers stop.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

class RecordIndex {
 public:
  explicit RecordIndex(const std::vector<ExtractionRecord>& records);
  // nullptr when absent.
  const ExtractionRecord* find(std::string_view id) const;

 private:
  std::map<std::string, const ExtractionRecord*, std::less<>> by_id_;
};

std::string parsed_completion_to_line(const std::string& record_id, std::int64_t sample_index,
                                      const ParsedCompletion& completion,
                                      const std::string& error = "");

struct ParsedLine {
  std::string record_id;
  std::int64_t sample_index = 0;
  std::string error;
  std::optional<ParsedCompletion> completion;  // absent when format is null
};
// Throws SchemaError. Extractions are attached to `gold`'s id and sentence
// when given.
ParsedLine parse_parsed_line(std::string_view line, const ExtractionRecord* gold = nullptr);

CommandResult run_parse(std::string_view completions, const std::vector<ExtractionRecord>& records,
                        ParseMode mode, std::size_t workers = 1);

// Headline scores use each record's lowest sample_index. With k, also Best@K
// and Avg@K over the first k samples by sample_index. Throws MissingRecord for
// ids absent from `records` and GroupTooSmall when a record has fewer than k
// samples.
CommandResult run_eval(std::string_view parsed, const std::vector<ExtractionRecord>& records,
                       std::optional<std::size_t> k = std::nullopt);
std::string eval_report_to_json(const EvalReport& report, const std::optional<AtKReport>& at_k);

CommandResult run_reward(std::string_view parsed, const std::vector<ExtractionRecord>& records,
                         const RewardConfig& cfg, RewardTask task, std::size_t workers = 1);
std::string reward_to_line(const std::string& record_id, std::int64_t sample_index,
                           const RewardBreakdown& r);

// {"epsilon": num, "beta": num, "std_floor": num}; absent keys keep the
// values of `base`. Throws ConfigError naming the offending field.
GrpoConfig parse_grpo_config(std::string_view json_text, const GrpoConfig& base = {});

CommandResult run_grpo(std::string_view groups, const GrpoConfig& cfg);

CommandResult run_dataset_stats(const std::vector<ExtractionRecord>& records);
CommandResult run_dataset_sft(const std::vector<ExtractionRecord>& records,
                              const std::vector<TaskKind>& tasks, bool mimic,
                              std::size_t workers = 1);
CommandResult run_dataset_curriculum(const std::vector<ExtractionRecord>& records,
                                     std::size_t n_buckets);
CommandResult run_dataset_select(const std::vector<ExtractionRecord>& records,
                                 const SelectionOptions& options);
// Throws MissingRecord.
CommandResult run_dataset_prompt(const std::vector<ExtractionRecord>& records,
                                 std::string_view record_id, TaskKind task);

// {"id": str, "score": num} per line.
std::map<std::string, double> parse_hardness(std::string_view text);

// Trainer-facing batch surface. Requests are JSON arrays of
//   {"record": <dataset record object>, "text": str}
// and the result is a JSON array with one element per request, either a
// reward object or {"error": {"code": str, "message": str}}.
std::string compute_rewards_batch(std::string_view requests_json, const RewardConfig& cfg,
                                  RewardTask task, std::size_t workers = 1);
// JSON array of reward arrays in, JSON array of advantage arrays out.
std::string advantages_batch(std::string_view groups_json, double std_floor = 1e-6);

}  // namespace sciex

#endif  // SCIEX_COMMANDS_HPP_
