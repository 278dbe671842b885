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

// Composite sequence-level reward for extraction completions:
//
//   R = w_f1 * R_f1 + w_span * R_span + w_relevancy * R_relevancy + w_rule * R_rule
//
// R_f1         per-record F1 against gold (NER, Rel, or their mean)
// R_span       mean word-level Jaccard over greedily matched same-type entities
// R_relevancy  share of quoted evidence found in the sentence, minus a
//              quadratic penalty once the cited length passes a threshold
// R_rule       weighted reasoning-pattern hits in the think block, clipped to 1
//
// With format gating on, a completion without a parseable answer block gets 0.

#ifndef SCIEX_REWARD_HPP_
#define SCIEX_REWARD_HPP_

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "sciex/core_model.hpp"
#include "sciex/output_parser.hpp"

namespace sciex {

enum class RewardTask { kNer, kRel, kEnd2End };

std::string_view to_string(RewardTask task);
RewardTask reward_task_from_string(std::string_view s);

// Matches when any phrase occurs in the think block as whole words, ignoring
// ASCII case.
struct RulePattern {
  std::string name;
  std::vector<std::string> any_of;
  double weight = 0.0;

  friend bool operator==(const RulePattern&, const RulePattern&) = default;
};

struct RewardConfig {
  double w_f1 = 0.6;
  double w_span = 0.1;
  double w_relevancy = 0.15;
  double w_rule = 0.15;
  // Rescale the four weights to sum to 1.
  bool normalize = false;
  double lambda_penalty = 0.5;
  // Fraction of the sentence length (in words).
  double length_threshold = 0.8;
  bool format_gate = true;
  bool case_sensitive = true;
  std::vector<RulePattern> rule_patterns = default_rule_patterns();

  static std::vector<RulePattern> default_rule_patterns();

  // Throws ConfigError with the offending field path.
  void validate() const;

  // The four weights as used in the total (after normalization, if on).
  std::array<double, 4> effective_weights() const;

  MatchOptions match_options() const { return MatchOptions{case_sensitive}; }

  friend bool operator==(const RewardConfig&, const RewardConfig&) = default;
};

// JSON config file. Unknown keys and wrong types raise ConfigError naming the
// field path; missing keys keep their defaults. The result is validated.
RewardConfig parse_reward_config(std::string_view json_text);
std::string to_json(const RewardConfig& cfg);

struct RewardBreakdown {
  double r_f1 = 0.0;
  double r_span = 0.0;
  double r_relevancy = 0.0;
  double r_rule = 0.0;
  double total = 0.0;
  bool gated = false;
};

double reward_f1(const ParsedCompletion& pred, const ExtractionRecord& gold, RewardTask task,
                 const MatchOptions& opts = {});
double reward_span(const ParsedCompletion& pred, const ExtractionRecord& gold,
                   const MatchOptions& opts = {});
double reward_relevancy(const ParsedCompletion& pred, const ExtractionRecord& gold,
                        const RewardConfig& cfg);
double reward_rule(const ParsedCompletion& pred, const RewardConfig& cfg);
RewardBreakdown reward_total(const ParsedCompletion& pred, const ExtractionRecord& gold,
                             const RewardConfig& cfg, RewardTask task);

// Helpers exposed for testing.
double word_jaccard(std::string_view a, std::string_view b);
// Maximal segments between straight ("...") or curly (“...”) double quotes.
std::vector<std::string> cited_segments(std::string_view think);
bool phrase_matches(std::string_view text, std::string_view phrase);

}  // namespace sciex

#endif  // SCIEX_REWARD_HPP_
