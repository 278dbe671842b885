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

#ifndef SCIEX_PROMPTS_HPP_
#define SCIEX_PROMPTS_HPP_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sciex/core_model.hpp"
#include "sciex/output_parser.hpp"

namespace sciex {

enum class TaskKind { kNerOnly = 0, kReGoldEntities, kReOnly, kEndToEnd };
inline constexpr std::array<TaskKind, 4> kAllTaskKinds = {
    TaskKind::kNerOnly, TaskKind::kReGoldEntities, TaskKind::kReOnly, TaskKind::kEndToEnd};

// "ner", "re_gold", "re", "e2e".
std::string_view to_string(TaskKind task);
TaskKind task_kind_from_string(std::string_view s);
// Comma-separated names, or "all".
std::vector<TaskKind> parse_task_list(std::string_view s);

std::string_view system_prompt();
std::string_view ner_background();
std::string_view relation_background();

// System prompt, the backgrounds the task needs, and the instruction with the
// sentence quoted (backslashes and double quotes escaped).
std::string render_prompt(const ExtractionRecord& record, TaskKind task);

// Recovers the sentence from a rendered prompt.
std::optional<std::string> extract_prompt_sentence(std::string_view prompt);

struct SftExample {
  std::string record_id;
  TaskKind task = TaskKind::kEndToEnd;
  std::string prompt;
  std::string target;
};

// The part of a record a task asks for: entities for NER, relations for the
// relation tasks, both end to end.
ExtractionRecord project_for_task(const ExtractionRecord& record, TaskKind task);

// records x tasks, record-major. Plain targets are the answer payload alone;
// mimic targets prepend the templated reasoning block.
std::vector<SftExample> make_sft_dataset(const std::vector<ExtractionRecord>& records,
                                         const std::vector<TaskKind>& tasks, bool mimic,
                                         const ReasoningTemplate& tmpl = ReasoningTemplate::standard());

std::string sft_example_to_line(const SftExample& example);

}  // namespace sciex

#endif  // SCIEX_PROMPTS_HPP_
