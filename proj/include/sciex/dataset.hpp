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

// Line-delimited dataset files. One JSON object per line:
//
//   {"id": "...", "sentence": "...",
//    "ner": [[surface, type], ...],
//    "rel": [[subject, relation, object], ...]}
//
// Type names are matched case-insensitively ("DATASET" == "Dataset"). Blank
// lines are skipped; unknown keys are ignored.

#ifndef SCIEX_DATASET_HPP_
#define SCIEX_DATASET_HPP_

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "sciex/core_model.hpp"

namespace sciex {

// Throws SchemaError (malformed line or violated gold invariant) or TypeError
// (unknown type name). `line_no` is only used in messages.
ExtractionRecord parse_record_line(std::string_view line, std::size_t line_no = 0);
std::string record_to_line(const ExtractionRecord& record);

// Parses every line; when any fail, throws an Error whose code is the first
// failure's and whose message lists all failures with their line numbers.
std::vector<ExtractionRecord> parse_dataset(std::string_view text);

// `path` is a file, or a directory holding "<split>.jsonl".
std::vector<ExtractionRecord> load_dataset(const std::string& path, const std::string& split = "");
void save_dataset(const std::string& path, const std::vector<ExtractionRecord>& records);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

struct DatasetStats {
  std::size_t n_records = 0;
  std::array<std::size_t, kNumEntityTypes> entities{};
  std::array<std::size_t, kNumRelationTypes> relations{};

  std::size_t entity_total() const;
  std::size_t relation_total() const;

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

DatasetStats compute_stats(const std::vector<ExtractionRecord>& records);
std::string stats_to_json(const DatasetStats& stats);
DatasetStats stats_from_json(std::string_view json_text);
// Human-readable count table.
std::string format_stats_table(const DatasetStats& stats);

}  // namespace sciex

#endif  // SCIEX_DATASET_HPP_
