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

// Extraction scoring: NER micro-F1, relation F1 under boundary (Rel) and
// strict (Rel+) matching, and Best F1@K / Avg@K over sampled completions.
//
// Rel counts a predicted triple correct when subject span, relation type and
// object span equal a gold triple (direction matters). Rel+ additionally
// requires both argument entity types to agree. Argument types are resolved
// from each side's own entity list when the triple does not carry them.

#ifndef SCIEX_METRICS_HPP_
#define SCIEX_METRICS_HPP_

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "sciex/core_model.hpp"
#include "sciex/output_parser.hpp"

namespace sciex {

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  Counts& operator+=(const Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const Counts&, const Counts&) = default;
};

// Precision/recall/F1 with 0/0 taken as 0.
struct PRF {
  Counts counts;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static PRF from_counts(const Counts& c);
};

PRF score_ner(const std::vector<EntityMention>& pred, const std::vector<EntityMention>& gold,
              const MatchOptions& opts = {});

// Triples are compared after type resolution against their own record.
PRF score_rel(const ExtractionRecord& pred, const ExtractionRecord& gold, bool strict,
              const MatchOptions& opts = {});

// Record-level convenience for the three tasks.
struct RecordScores {
  PRF ner;
  PRF rel;
  PRF rel_plus;
};
RecordScores score_record(const ExtractionRecord& pred, const ExtractionRecord& gold,
                          const MatchOptions& opts = {});

struct EvalReport {
  PRF ner;
  PRF rel;
  PRF rel_plus;
  std::array<PRF, kNumEntityTypes> ner_by_type;
  std::array<PRF, kNumRelationTypes> rel_by_type;
  std::size_t n_records = 0;
  double format_valid_rate = 0.0;
};

// One evaluated prediction. An absent extraction scores as an empty one.
struct ScoredPair {
  const ExtractionRecord* gold = nullptr;
  const ParsedCompletion* completion = nullptr;
};

// Micro aggregation: tp/fp/fn are summed over records, then turned into PRF.
EvalReport evaluate(const std::vector<ScoredPair>& pairs, const MatchOptions& opts = {});

struct TaskScores {
  double ner = 0.0;
  double rel = 0.0;
  double rel_plus = 0.0;
};

struct AtKReport {
  std::size_t k = 0;
  TaskScores best_f1_at_k;
  TaskScores avg_at_k;
  std::size_t n_records = 0;
};

// Per-record F1 of a single completion; unparseable completions score 0.
TaskScores completion_f1(const ParsedCompletion& completion, const ExtractionRecord& gold,
                         const MatchOptions& opts = {});

using SampleGroup = std::pair<const ExtractionRecord*, std::vector<const ParsedCompletion*>>;

// Uses the first k completions of each group. Throws GroupTooSmall when a
// group holds fewer than k, and InvalidArgument for k == 0.
AtKReport score_at_k(const std::vector<SampleGroup>& groups, std::size_t k,
                     const MatchOptions& opts = {});

}  // namespace sciex

#endif  // SCIEX_METRICS_HPP_
