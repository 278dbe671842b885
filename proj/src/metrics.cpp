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

#include "sciex/metrics.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <tuple>

#include "sciex/error.hpp"

namespace sciex {

namespace {

using EntityKey = std::pair<std::string, int>;
// (subject, relation, object, subject type, object type). Unknown types get
// distinct sentinels per side so they never match.
using TripleKey = std::tuple<std::string, int, std::string, int, int>;

constexpr int kMissingGoldType = -1;
constexpr int kMissingPredType = -2;

std::set<EntityKey> entity_keys(const std::vector<EntityMention>& mentions,
                                const MatchOptions& opts, std::optional<EntityType> only = {}) {
  std::set<EntityKey> keys;
  for (const auto& m : mentions) {
    if (only && m.type != *only) continue;
    keys.emplace(match_key(m.surface, opts), static_cast<int>(m.type));
  }
  return keys;
}

std::set<TripleKey> triple_keys(const ExtractionRecord& record, bool strict, int missing,
                                const MatchOptions& opts, std::optional<RelationType> only = {}) {
  std::set<TripleKey> keys;
  const ExtractionRecord resolved = record.with_resolved_types(opts);
  for (const auto& t : resolved.relations()) {
    if (only && t.relation != *only) continue;
    int st = 0;
    int ot = 0;
    if (strict) {
      st = t.subject_type ? static_cast<int>(*t.subject_type) : missing;
      ot = t.object_type ? static_cast<int>(*t.object_type) : missing;
    }
    keys.emplace(match_key(t.subject, opts), static_cast<int>(t.relation),
                 match_key(t.object, opts), st, ot);
  }
  return keys;
}

template <typename Key>
Counts overlap(const std::set<Key>& pred, const std::set<Key>& gold) {
  Counts c;
  for (const auto& k : pred) {
    if (gold.count(k)) ++c.tp;
  }
  c.fp = pred.size() - c.tp;
  c.fn = gold.size() - c.tp;
  return c;
}

const ExtractionRecord& empty_prediction() {
  static const ExtractionRecord empty;
  return empty;
}

}  // namespace

PRF PRF::from_counts(const Counts& c) {
  PRF out;
  out.counts = c;
  out.precision = (c.tp + c.fp) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
  out.recall = (c.tp + c.fn) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  const double sum = out.precision + out.recall;
  out.f1 = sum > 0.0 ? 2.0 * out.precision * out.recall / sum : 0.0;
  return out;
}

PRF score_ner(const std::vector<EntityMention>& pred, const std::vector<EntityMention>& gold,
              const MatchOptions& opts) {
  return PRF::from_counts(overlap(entity_keys(pred, opts), entity_keys(gold, opts)));
}

PRF score_rel(const ExtractionRecord& pred, const ExtractionRecord& gold, bool strict,
              const MatchOptions& opts) {
  return PRF::from_counts(overlap(triple_keys(pred, strict, kMissingPredType, opts),
                                  triple_keys(gold, strict, kMissingGoldType, opts)));
}

RecordScores score_record(const ExtractionRecord& pred, const ExtractionRecord& gold,
                          const MatchOptions& opts) {
  return RecordScores{score_ner(pred.entities(), gold.entities(), opts),
                      score_rel(pred, gold, /*strict=*/false, opts),
                      score_rel(pred, gold, /*strict=*/true, opts)};
}

EvalReport evaluate(const std::vector<ScoredPair>& pairs, const MatchOptions& opts) {
  Counts ner, rel, rel_plus;
  std::array<Counts, kNumEntityTypes> ner_by_type{};
  std::array<Counts, kNumRelationTypes> rel_by_type{};
  std::size_t valid = 0;

  for (const auto& [gold, completion] : pairs) {
    if (gold == nullptr) throw Error(ErrorCode::kInvalidArgument, "null gold record");
    const ExtractionRecord& pred = (completion && completion->extraction)
                                       ? *completion->extraction
                                       : empty_prediction();
    if (completion && completion->format.strict_ok) ++valid;

    RecordScores s = score_record(pred, *gold, opts);
    ner += s.ner.counts;
    rel += s.rel.counts;
    rel_plus += s.rel_plus.counts;
    for (EntityType t : kAllEntityTypes) {
      ner_by_type[static_cast<std::size_t>(t)] +=
          overlap(entity_keys(pred.entities(), opts, t), entity_keys(gold->entities(), opts, t));
    }
    for (RelationType r : kAllRelationTypes) {
      rel_by_type[static_cast<std::size_t>(r)] +=
          overlap(triple_keys(pred, false, kMissingPredType, opts, r),
                  triple_keys(*gold, false, kMissingGoldType, opts, r));
    }
  }

  EvalReport report;
  report.ner = PRF::from_counts(ner);
  report.rel = PRF::from_counts(rel);
  report.rel_plus = PRF::from_counts(rel_plus);
  for (std::size_t i = 0; i < kNumEntityTypes; ++i) {
    report.ner_by_type[i] = PRF::from_counts(ner_by_type[i]);
  }
  for (std::size_t i = 0; i < kNumRelationTypes; ++i) {
    report.rel_by_type[i] = PRF::from_counts(rel_by_type[i]);
  }
  report.n_records = pairs.size();
  report.format_valid_rate =
      pairs.empty() ? 0.0 : static_cast<double>(valid) / static_cast<double>(pairs.size());
  return report;
}

TaskScores completion_f1(const ParsedCompletion& completion, const ExtractionRecord& gold,
                         const MatchOptions& opts) {
  if (!completion.extraction) return {};
  RecordScores s = score_record(*completion.extraction, gold, opts);
  return {s.ner.f1, s.rel.f1, s.rel_plus.f1};
}

AtKReport score_at_k(const std::vector<SampleGroup>& groups, std::size_t k,
                     const MatchOptions& opts) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  AtKReport report;
  report.k = k;
  report.n_records = groups.size();
  if (groups.empty()) return report;

  TaskScores best_sum, avg_sum;
  for (const auto& [gold, samples] : groups) {
    if (samples.size() < k) {
      throw GroupTooSmall("record '" + (gold ? gold->id() : std::string()) + "' has " +
                          std::to_string(samples.size()) + " completions, k = " +
                          std::to_string(k));
    }
    // Running means stay exact for identical samples and inside [min, max].
    TaskScores best{}, mean{};
    for (std::size_t i = 0; i < k; ++i) {
      TaskScores s = completion_f1(*samples[i], *gold, opts);
      const double n = static_cast<double>(i + 1);
      best.ner = std::max(best.ner, s.ner);
      best.rel = std::max(best.rel, s.rel);
      best.rel_plus = std::max(best.rel_plus, s.rel_plus);
      mean.ner += (s.ner - mean.ner) / n;
      mean.rel += (s.rel - mean.rel) / n;
      mean.rel_plus += (s.rel_plus - mean.rel_plus) / n;
    }
    best_sum.ner += best.ner;
    best_sum.rel += best.rel;
    best_sum.rel_plus += best.rel_plus;
    avg_sum.ner += std::min(mean.ner, best.ner);
    avg_sum.rel += std::min(mean.rel, best.rel);
    avg_sum.rel_plus += std::min(mean.rel_plus, best.rel_plus);
  }
  const double n = static_cast<double>(groups.size());
  report.best_f1_at_k = {best_sum.ner / n, best_sum.rel / n, best_sum.rel_plus / n};
  report.avg_at_k = {avg_sum.ner / n, avg_sum.rel / n, avg_sum.rel_plus / n};
  return report;
}

}  // namespace sciex
