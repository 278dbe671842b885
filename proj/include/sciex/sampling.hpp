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


#ifndef SCIEX_SAMPLING_HPP_
#define SCIEX_SAMPLING_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sciex/core_model.hpp"

namespace sciex {

// Number of entities plus number of relation triples.
std::size_t difficulty(const ExtractionRecord& record);

struct CurriculumBucket {
  std::size_t min_difficulty = 0;
  std::size_t max_difficulty = 0;
  std::vector<std::string> ids;
};

struct CurriculumPlan {
  std::vector<CurriculumBucket> buckets;
  std::vector<std::string> schedule;
};

// Sorts by (difficulty, id) and cuts at the n_buckets quantiles. A cut never
// separates records of equal difficulty, so fewer buckets may come back.
CurriculumPlan build_curriculum(const std::vector<ExtractionRecord>& records, std::size_t n_buckets);
std::string curriculum_to_json(const CurriculumPlan& plan);

// mt19937_64 with portable integer draws. The standard distributions are
// implementation-defined, so they are not used.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Most frequent entity type, ties going to the earlier type; nullopt for a
// record without entities.
std::optional<EntityType> dominant_entity_type(const ExtractionRecord& record);

struct SelectionOptions {
  std::size_t size = 0;
  std::uint64_t seed = 0;
  std::size_t n_buckets = 4;
  // record id -> score in [0, 1]; higher is picked first within a cell.
  std::map<std::string, double> hardness;
};

struct SelectionCell {
  std::string entity_type;  // "none" for records without entities
  std::size_t bucket = 0;
  std::size_t available = 0;
  std::size_t quota = 0;
};

struct SelectionReport {
  std::size_t corpus_size = 0;
  std::size_t size = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> chosen_ids;  // in corpus order
  std::array<std::size_t, kNumEntityTypes> entity_counts{};
  std::array<std::size_t, kNumRelationTypes> relation_counts{};
  std::array<std::size_t, kNumEntityTypes> corpus_entity_counts{};
  std::array<std::size_t, kNumRelationTypes> corpus_relation_counts{};
  std::vector<CurriculumBucket> difficulty_buckets;  // corpus bucket ranges
  std::vector<std::size_t> bucket_counts;            // chosen records per bucket
  std::vector<SelectionCell> cells;
  // Largest absolute gap between a subset type proportion and the corpus one,
  // over entity and relation types.
  double max_proportion_deviation = 0.0;
  // Largest |quota - size * available / corpus_size| over cells.
  double max_cell_count_deviation = 0.0;
};

// Stratified by (dominant entity type, difficulty bucket) with
// largest-remainder quotas. Throws SizeTooLarge when size exceeds the corpus
// and InvalidArgument for hardness scores outside [0, 1].
SelectionReport select_subset(const std::vector<ExtractionRecord>& records,
                              const SelectionOptions& options);
std::string selection_to_json(const SelectionReport& report);

}  // namespace sciex

#endif  // SCIEX_SAMPLING_HPP_
