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

#include "sciex/reward.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "json.hpp"
#include "sciex/error.hpp"
#include "sciex/metrics.hpp"

namespace sciex {

namespace {

using json = nlohmann::json;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Length in words of the longest run of consecutive words shared by a and b.
std::size_t longest_common_run(const std::vector<std::string>& a,
                               const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = (a[i - 1] == b[j - 1]) ? prev[j - 1] + 1 : 0;
      best = std::max(best, cur[j]);
    }
    std::swap(prev, cur);
  }
  return best;
}

double number_field(const json& obj, const std::string& key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

bool bool_field(const json& obj, const std::string& key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
  return v.get<bool>();
}

}  // namespace

std::string_view to_string(RewardTask task) {
  switch (task) {
    case RewardTask::kNer: return "ner";
    case RewardTask::kRel: return "rel";
    case RewardTask::kEnd2End: return "end2end";
  }
  return "end2end";
}

RewardTask reward_task_from_string(std::string_view s) {
  if (s == "ner") return RewardTask::kNer;
  if (s == "rel") return RewardTask::kRel;
  if (s == "end2end") return RewardTask::kEnd2End;
  throw Error(ErrorCode::kInvalidArgument, "unknown reward task '" + std::string(s) + "'");
}

std::vector<RulePattern> RewardConfig::default_rule_patterns() {
  std::vector<RulePattern> patterns;
  for (const char* marker : {"cause", "leads to", "implies", "because", "therefore", "→"}) {
    patterns.push_back({std::string("causal:") + marker, {marker}, 0.15});
  }
  RulePattern definition{"relation-definition", {}, 0.25};
  for (RelationType r : kAllRelationTypes) definition.any_of.emplace_back(to_string(r));
  patterns.push_back(std::move(definition));
  patterns.push_back({"pattern-articulation", {"suggests", "indicates"}, 0.15});
  return patterns;
}

void RewardConfig::validate() const {
  const std::array<std::pair<const char*, double>, 4> weights = {
      {{"weights.f1", w_f1}, {"weights.span", w_span}, {"weights.relevancy", w_relevancy},
       {"weights.rule", w_rule}}};
  double sum = 0.0;
  for (const auto& [path, w] : weights) {
    if (!std::isfinite(w) || w < 0.0) throw ConfigError(path, "must be a non-negative number");
    sum += w;
  }
  if (normalize && sum <= 0.0) throw ConfigError("weights", "cannot normalize all-zero weights");
  if (!normalize && sum > 1.0 + 1e-9) {
    throw ConfigError("weights", "sum exceeds 1 (set \"normalize\": true to rescale)");
  }
  if (!std::isfinite(lambda_penalty) || lambda_penalty < 0.0) {
    throw ConfigError("lambda_penalty", "must be a non-negative number");
  }
  if (!std::isfinite(length_threshold) || length_threshold < 0.0) {
    throw ConfigError("length_threshold", "must be a non-negative number");
  }
  for (std::size_t i = 0; i < rule_patterns.size(); ++i) {
    const RulePattern& p = rule_patterns[i];
    const std::string path = "rule_patterns[" + std::to_string(i) + "]";
    if (!std::isfinite(p.weight) || p.weight < 0.0 || p.weight > 1.0) {
      throw ConfigError(path + ".weight", "must lie in [0, 1]");
    }
    if (p.any_of.empty()) throw ConfigError(path + ".any_of", "must list at least one phrase");
    for (std::size_t j = 0; j < p.any_of.size(); ++j) {
      if (normalize_span(p.any_of[j]).empty()) {
        throw ConfigError(path + ".any_of[" + std::to_string(j) + "]", "empty phrase");
      }
    }
  }
}

std::array<double, 4> RewardConfig::effective_weights() const {
  std::array<double, 4> w = {w_f1, w_span, w_relevancy, w_rule};
  if (normalize) {
    const double sum = w[0] + w[1] + w[2] + w[3];
    for (double& x : w) x /= sum;
  }
  return w;
}

RewardConfig parse_reward_config(std::string_view json_text) {
  json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw ConfigError("$", "not valid JSON");
  if (!doc.is_object()) throw ConfigError("$", "expected an object");

  RewardConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "weights") {
      if (!value.is_object()) throw ConfigError("weights", "expected an object");
      for (const auto& [wkey, wvalue] : value.items()) {
        const std::string path = "weights." + wkey;
        double* slot = wkey == "f1"          ? &cfg.w_f1
                       : wkey == "span"      ? &cfg.w_span
                       : wkey == "relevancy" ? &cfg.w_relevancy
                       : wkey == "rule"      ? &cfg.w_rule
                                             : nullptr;
        if (slot == nullptr) throw ConfigError(path, "unknown field");
        *slot = number_field(value, wkey, path);
      }
    } else if (key == "normalize") {
      cfg.normalize = bool_field(doc, key, key);
    } else if (key == "lambda_penalty") {
      cfg.lambda_penalty = number_field(doc, key, key);
    } else if (key == "length_threshold") {
      cfg.length_threshold = number_field(doc, key, key);
    } else if (key == "format_gate") {
      cfg.format_gate = bool_field(doc, key, key);
    } else if (key == "case_sensitive") {
      cfg.case_sensitive = bool_field(doc, key, key);
    } else if (key == "rule_patterns") {
      if (!value.is_array()) throw ConfigError(key, "expected an array");
      cfg.rule_patterns.clear();
      for (std::size_t i = 0; i < value.size(); ++i) {
        const json& item = value[i];
        const std::string path = "rule_patterns[" + std::to_string(i) + "]";
        if (!item.is_object()) throw ConfigError(path, "expected an object");
        RulePattern p;
        for (const auto& [pkey, pvalue] : item.items()) {
          if (pkey == "name") {
            if (!pvalue.is_string()) throw ConfigError(path + ".name", "expected a string");
            p.name = pvalue.get<std::string>();
          } else if (pkey == "weight") {
            p.weight = number_field(item, pkey, path + ".weight");
          } else if (pkey == "any_of") {
            if (!pvalue.is_array()) throw ConfigError(path + ".any_of", "expected an array");
            for (std::size_t j = 0; j < pvalue.size(); ++j) {
              if (!pvalue[j].is_string()) {
                throw ConfigError(path + ".any_of[" + std::to_string(j) + "]",
                                  "expected a string");
              }
              p.any_of.push_back(pvalue[j].get<std::string>());
            }
          } else {
            throw ConfigError(path + "." + pkey, "unknown field");
          }
        }
        cfg.rule_patterns.push_back(std::move(p));
      }
    } else {
      throw ConfigError(key, "unknown field");
    }
  }
  cfg.validate();
  return cfg;
}

std::string to_json(const RewardConfig& cfg) {
  json patterns = json::array();
  for (const auto& p : cfg.rule_patterns) {
    patterns.push_back({{"name", p.name}, {"any_of", p.any_of}, {"weight", p.weight}});
  }
  json doc = {
      {"weights",
       {{"f1", cfg.w_f1}, {"span", cfg.w_span}, {"relevancy", cfg.w_relevancy}, {"rule", cfg.w_rule}}},
      {"normalize", cfg.normalize},
      {"lambda_penalty", cfg.lambda_penalty},
      {"length_threshold", cfg.length_threshold},
      {"format_gate", cfg.format_gate},
      {"case_sensitive", cfg.case_sensitive},
      {"rule_patterns", patterns},
  };
  return doc.dump(2);
}

double word_jaccard(std::string_view a, std::string_view b) {
  auto wa = split_words(a);
  auto wb = split_words(b);
  std::set<std::string> sa(wa.begin(), wa.end());
  std::set<std::string> sb(wb.begin(), wb.end());
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& w : sa) inter += sb.count(w);
  return static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size() - inter);
}

std::vector<std::string> cited_segments(std::string_view think) {
  static constexpr std::string_view kCurlyOpen = "\xE2\x80\x9C";   // “
  static constexpr std::string_view kCurlyClose = "\xE2\x80\x9D";  // ”
  std::vector<std::string> segments;
  std::size_t i = 0;
  while (i < think.size()) {
    std::string_view closer;
    std::size_t start = 0;
    if (think[i] == '"') {
      closer = "\"";
      start = i + 1;
    } else if (think.substr(i, kCurlyOpen.size()) == kCurlyOpen) {
      closer = kCurlyClose;
      start = i + kCurlyOpen.size();
    } else {
      ++i;
      continue;
    }
    std::size_t end = think.find(closer, start);
    if (end == std::string_view::npos) break;
    std::string seg = normalize_span(think.substr(start, end - start));
    if (!seg.empty()) segments.push_back(std::move(seg));
    i = end + closer.size();
  }
  return segments;
}

bool phrase_matches(std::string_view text, std::string_view phrase) {
  const std::string hay = ascii_lower(text);
  const std::string needle = ascii_lower(normalize_span(phrase));
  if (needle.empty()) return false;
  const bool check_front = is_word_char(needle.front());
  const bool check_back = is_word_char(needle.back());
  for (std::size_t p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) {
    const std::size_t after = p + needle.size();
    if (check_front && p > 0 && is_word_char(hay[p - 1])) continue;
    if (check_back && after < hay.size() && is_word_char(hay[after])) continue;
    return true;
  }
  return false;
}

double reward_f1(const ParsedCompletion& pred, const ExtractionRecord& gold, RewardTask task,
                 const MatchOptions& opts) {
  if (!pred.extraction) return 0.0;
  const ExtractionRecord& p = *pred.extraction;
  switch (task) {
    case RewardTask::kNer:
      return score_ner(p.entities(), gold.entities(), opts).f1;
    case RewardTask::kRel:
      return score_rel(p, gold, /*strict=*/false, opts).f1;
    case RewardTask::kEnd2End:
      return 0.5 * (score_ner(p.entities(), gold.entities(), opts).f1 +
                    score_rel(p, gold, /*strict=*/false, opts).f1);
  }
  return 0.0;
}

double reward_span(const ParsedCompletion& pred, const ExtractionRecord& gold,
                   const MatchOptions& opts) {
  if (!pred.extraction) return 0.0;
  const auto& preds = pred.extraction->entities();
  const auto& golds = gold.entities();
  const std::string sentence = match_key(gold.sentence(), opts);

  struct Candidate {
    double jaccard;
    std::size_t gold_pos;
    std::string gold_key;
    std::string pred_key;
    std::size_t gi;
    std::size_t pi;
  };
  std::vector<Candidate> candidates;
  for (std::size_t gi = 0; gi < golds.size(); ++gi) {
    const std::string gkey = match_key(golds[gi].surface, opts);
    const std::size_t gpos = sentence.find(gkey);
    for (std::size_t pi = 0; pi < preds.size(); ++pi) {
      if (preds[pi].type != golds[gi].type) continue;
      std::string pkey = match_key(preds[pi].surface, opts);
      const double j = word_jaccard(pkey, gkey);
      if (j > 0.0) candidates.push_back({j, gpos, gkey, std::move(pkey), gi, pi});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(b.jaccard, a.gold_pos, a.gold_key, a.pred_key, a.gi, a.pi) <
           std::tie(a.jaccard, b.gold_pos, b.gold_key, b.pred_key, b.gi, b.pi);
  });

  std::vector<bool> gold_used(golds.size(), false), pred_used(preds.size(), false);
  double sum = 0.0;
  std::size_t matched = 0;
  for (const auto& c : candidates) {
    if (gold_used[c.gi] || pred_used[c.pi]) continue;
    gold_used[c.gi] = pred_used[c.pi] = true;
    sum += c.jaccard;
    ++matched;
  }
  return matched ? clamp01(sum / static_cast<double>(matched)) : 0.0;
}

double reward_relevancy(const ParsedCompletion& pred, const ExtractionRecord& gold,
                        const RewardConfig& cfg) {
  const MatchOptions opts = cfg.match_options();
  const std::string sentence = match_key(gold.sentence(), opts);
  const std::size_t sentence_len = split_words(sentence).size();
  if (normalize_span(pred.think).empty() || sentence_len == 0) return 0.0;

  double map = 0.0;
  std::size_t cited_len = 0;
  const std::vector<std::string> segments = cited_segments(pred.think);
  if (!segments.empty()) {
    std::size_t found = 0;
    for (const auto& seg : segments) {
      cited_len += split_words(seg).size();
      if (sentence.find(match_key(seg, opts)) != std::string::npos) ++found;
    }
    map = static_cast<double>(found) / static_cast<double>(segments.size());
  } else {
    const std::size_t run =
        longest_common_run(split_words(match_key(pred.think, opts)), split_words(sentence));
    map = run >= 3 ? 1.0 : 0.0;
    cited_len = run;
  }

  const double ratio = static_cast<double>(cited_len) / static_cast<double>(sentence_len);
  double score = map;
  if (static_cast<double>(cited_len) > cfg.length_threshold * static_cast<double>(sentence_len)) {
    score -= cfg.lambda_penalty * ratio * ratio;
  }
  return clamp01(score);
}

double reward_rule(const ParsedCompletion& pred, const RewardConfig& cfg) {
  if (normalize_span(pred.think).empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : cfg.rule_patterns) {
    const bool hit = std::any_of(p.any_of.begin(), p.any_of.end(),
                                 [&](const std::string& phrase) {
                                   return phrase_matches(pred.think, phrase);
                                 });
    if (hit) sum += p.weight;
  }
  return clamp01(sum);
}

RewardBreakdown reward_total(const ParsedCompletion& pred, const ExtractionRecord& gold,
                             const RewardConfig& cfg, RewardTask task) {
  const MatchOptions opts = cfg.match_options();
  RewardBreakdown b;
  b.r_f1 = reward_f1(pred, gold, task, opts);
  b.r_span = reward_span(pred, gold, opts);
  b.r_relevancy = reward_relevancy(pred, gold, cfg);
  b.r_rule = reward_rule(pred, cfg);

  const auto w = cfg.effective_weights();
  b.gated = cfg.format_gate && !(pred.format.has_answer && pred.format.answer_parses);
  b.total = b.gated ? 0.0
                    : clamp01(w[0] * b.r_f1 + w[1] * b.r_span + w[2] * b.r_relevancy +
                              w[3] * b.r_rule);
  return b;
}

}  // namespace sciex
