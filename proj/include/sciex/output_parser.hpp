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

// Parsing of model completions written in the block grammar
//
//   <reasoning> ... </reasoning>
//   <think> ... </think>
//   <answer> {"ner": [[entity, type], ...], "rel": [[subject, relation, object], ...]} </answer>
//
// and the inverse rendering used to build supervised targets.
//
// Strict mode requires the reasoning and answer blocks exactly once each, an
// optional single think block between them, and a payload of arrays using the
// canonical type spellings. Lenient mode never fails: it takes the outermost
// (first) pair of each tag, recovers the first JSON object carrying a "ner" or
// "rel" key (code fences and surrounding prose are skipped), accepts
// {"entity", "type"} / {"subject", "relation", "object"} objects, matches type
// names case-insensitively, and drops items it cannot type.

#ifndef SCIEX_OUTPUT_PARSER_HPP_
#define SCIEX_OUTPUT_PARSER_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sciex/core_model.hpp"

namespace sciex {

enum class ParseMode { kStrict, kLenient };

std::string_view to_string(ParseMode mode);
ParseMode parse_mode_from_string(std::string_view s);

struct FormatReport {
  bool has_reasoning = false;
  bool has_think = false;
  bool has_answer = false;
  bool answer_parses = false;
  bool blocks_in_order = false;
  // Items removed from the payload because they could not be typed.
  std::size_t dropped_items = 0;
  // Whether strict parsing of the same text succeeds, and if not, why.
  bool strict_ok = false;
  std::string strict_violation;

  friend bool operator==(const FormatReport&, const FormatReport&) = default;
};

struct ParsedCompletion {
  std::string reasoning;
  std::string think;
  std::string answer_raw;
  // Present iff format.answer_parses. Carries the prompt record's id and
  // sentence, never its annotations.
  std::optional<ExtractionRecord> extraction;
  FormatReport format;

  friend bool operator==(const ParsedCompletion&, const ParsedCompletion&) = default;
};

// Strict mode throws ParseError naming the first violated rule.
ParsedCompletion parse_completion(std::string_view raw, const ExtractionRecord& source,
                                  ParseMode mode);

// Step texts for the templated reasoning block. Slots: {entity_types},
// {relation_types}, {entity_count}, {relation_count}.
struct ReasoningTemplate {
  std::vector<std::string> steps;

  static ReasoningTemplate standard();
  std::string render(const ExtractionRecord& record) const;
};

// Canonical answer payload, "ner" before "rel". Either key may be omitted.
std::string render_answer(const ExtractionRecord& record, bool include_ner = true,
                          bool include_rel = true);

// <reasoning> block from `tmpl` followed by the <answer> block.
std::string render_target(const ExtractionRecord& record, const ReasoningTemplate& tmpl,
                          bool include_ner = true, bool include_rel = true);

}  // namespace sciex

#endif  // SCIEX_OUTPUT_PARSER_HPP_
