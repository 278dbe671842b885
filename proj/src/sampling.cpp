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


#include "sciex/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "json.hpp"
#include "sciex/error.hpp"

namespace sciex {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kNoEntityCell = kNumEntityTypes;

double max_gap(const std::size_t* part, const std::size_t* whole, std::size_t n) {
  const std::size_t part_total = std::accumulate(part, part + n, std::size_t{0});
  const std::size_t whole_total = std::accumulate(whole, whole + n, std::size_t{0});
  double gap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = part_total ? static_cast<double>(part[i]) / static_cast<double>(part_total) : 0.0;
    const double q =
        whole_total ? static_cast<double>(whole[i]) / static_cast<double>(whole_total) : 0.0;
    gap = std::max(gap, std::abs(p - q));
  }
  return gap;
}

ordered_json bucket_json(const CurriculumBucket& b) {
  ordered_json out;
  out["min_difficulty"] = b.min_difficulty;
  out["max_difficulty"] = b.max_difficulty;
  out["ids"] = b.ids;
  return out;
}

}  // namespace

std::size_t difficulty(const ExtractionRecord& record) {
  return record.entities().size() + record.relations().size();
}

CurriculumPlan build_curriculum(const std::vector<ExtractionRecord>& records,
                                std::size_t n_buckets) {
  if (n_buckets == 0) throw Error(ErrorCode::kInvalidArgument, "n_buckets must be >= 1");
  std::vector<std::pair<std::size_t, const std::string*>> order;
  order.reserve(records.size());
  for (const auto& r : records) order.emplace_back(difficulty(r), &r.id());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : *a.second < *b.second;
  });

  const std::size_t n = order.size();
  std::vector<std::size_t> cuts;
  for (std::size_t b = 1; b < n_buckets; ++b) {
    std::size_t cut = (2 * b * n + n_buckets) / (2 * n_buckets);
    while (cut > 0 && cut < n && order[cut].first == order[cut - 1].first) ++cut;
    if (cut == 0 || cut >= n) continue;
    if (!cuts.empty() && cut <= cuts.back()) continue;
    cuts.push_back(cut);
  }
  cuts.push_back(n);

  CurriculumPlan plan;
  std::size_t start = 0;
  for (std::size_t end : cuts) {
    if (end <= start) continue;
    CurriculumBucket bucket;
    bucket.min_difficulty = order[start].first;
    bucket.max_difficulty = order[end - 1].first;
    for (std::size_t i = start; i < end; ++i) {
      bucket.ids.push_back(*order[i].second);
      plan.schedule.push_back(*order[i].second);
    }
    plan.buckets.push_back(std::move(bucket));
    start = end;
  }
  return plan;
}

std::string curriculum_to_json(const CurriculumPlan& plan) {
  ordered_json doc;
  doc["n_records"] = plan.schedule.size();
  doc["buckets"] = ordered_json::array();
  for (const auto& b : plan.buckets) doc["buckets"].push_back(bucket_json(b));
  doc["schedule"] = plan.schedule;
  return doc.dump();
}

std::uint64_t SeededRng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "empty draw range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::optional<EntityType> dominant_entity_type(const ExtractionRecord& record) {
  std::array<std::size_t, kNumEntityTypes> counts{};
  for (const auto& e : record.entities()) ++counts[static_cast<std::size_t>(e.type)];
  std::optional<EntityType> best;
  std::size_t best_count = 0;
  for (EntityType t : kAllEntityTypes) {
    if (counts[static_cast<std::size_t>(t)] > best_count) {
      best = t;
      best_count = counts[static_cast<std::size_t>(t)];
    }
  }
  return best;
}

SelectionReport select_subset(const std::vector<ExtractionRecord>& records,
                              const SelectionOptions& options) {
  const std::size_t n = records.size();
  if (options.size > n) {
    throw SizeTooLarge("requested " + std::to_string(options.size) + " records from a corpus of " +
                       std::to_string(n));
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(records[i].id(), i);
  for (const auto& [id, score] : options.hardness) {
    if (!(score >= 0.0 && score <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "hardness score for '" + id + "' must lie in [0, 1]");
    }
    if (!index.count(id)) throw MissingRecord("hardness score for unknown record '" + id + "'");
  }

  SelectionReport report;
  report.corpus_size = n;
  report.size = options.size;
  report.seed = options.seed;

  CurriculumPlan plan = build_curriculum(records, std::max<std::size_t>(options.n_buckets, 1));
  std::map<std::string, std::size_t> bucket_of;
  for (std::size_t b = 0; b < plan.buckets.size(); ++b) {
    for (const auto& id : plan.buckets[b].ids) bucket_of[id] = b;
  }
  const std::size_t n_buckets = plan.buckets.size();

  // Cell index = entity cell * n_buckets + bucket; members listed in corpus order.
  std::vector<std::vector<std::size_t>> members((kNumEntityTypes + 1) * n_buckets);
  for (std::size_t i = 0; i < n; ++i) {
    auto dom = dominant_entity_type(records[i]);
    const std::size_t e = dom ? static_cast<std::size_t>(*dom) : kNoEntityCell;
    members[e * n_buckets + bucket_of.at(records[i].id())].push_back(i);
  }

  struct Quota {
    std::size_t cell;
    std::size_t base;
    std::size_t remainder;
  };
  std::vector<Quota> quotas;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (members[c].empty()) continue;
    const std::size_t scaled = options.size * members[c].size();
    quotas.push_back({c, scaled / n, scaled % n});
    assigned += scaled / n;
  }
  std::vector<std::size_t> by_remainder(quotas.size());
  std::iota(by_remainder.begin(), by_remainder.end(), std::size_t{0});
  std::stable_sort(by_remainder.begin(), by_remainder.end(), [&](std::size_t a, std::size_t b) {
    return quotas[a].remainder > quotas[b].remainder;
  });
  for (std::size_t j = 0; assigned < options.size; ++j, ++assigned) {
    ++quotas[by_remainder[j]].base;
  }

  SeededRng rng(options.seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(options.size);
  for (const Quota& q : quotas) {
    const auto& cell = members[q.cell];
    std::vector<std::size_t> scored, unscored;
    for (std::size_t i : cell) {
      (options.hardness.count(records[i].id()) ? scored : unscored).push_back(i);
    }
    std::sort(scored.begin(), scored.end(), [&](std::size_t a, std::size_t b) {
      const double ha = options.hardness.at(records[a].id());
      const double hb = options.hardness.at(records[b].id());
      return ha != hb ? ha > hb : records[a].id() < records[b].id();
    });
    rng.shuffle(unscored);
    scored.insert(scored.end(), unscored.begin(), unscored.end());
    chosen.insert(chosen.end(), scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(q.base));

    SelectionCell info;
    const std::size_t e = q.cell / n_buckets;
    info.entity_type = e == kNoEntityCell ? "none" : std::string(to_string(kAllEntityTypes[e]));
    info.bucket = q.cell % n_buckets;
    info.available = cell.size();
    info.quota = q.base;
    report.cells.push_back(info);
    const double ideal = static_cast<double>(options.size) * static_cast<double>(cell.size()) /
                         static_cast<double>(n);
    report.max_cell_count_deviation =
        std::max(report.max_cell_count_deviation, std::abs(static_cast<double>(q.base) - ideal));
  }
  std::sort(chosen.begin(), chosen.end());

  report.bucket_counts.assign(n_buckets, 0);
  for (std::size_t i : chosen) {
    const auto& r = records[i];
    report.chosen_ids.push_back(r.id());
    ++report.bucket_counts[bucket_of.at(r.id())];
    for (const auto& e : r.entities()) ++report.entity_counts[static_cast<std::size_t>(e.type)];
    for (const auto& t : r.relations()) ++report.relation_counts[static_cast<std::size_t>(t.relation)];
  }
  for (const auto& r : records) {
    for (const auto& e : r.entities()) ++report.corpus_entity_counts[static_cast<std::size_t>(e.type)];
    for (const auto& t : r.relations()) {
      ++report.corpus_relation_counts[static_cast<std::size_t>(t.relation)];
    }
  }
  for (auto& b : plan.buckets) b.ids.clear();
  report.difficulty_buckets = std::move(plan.buckets);
  report.max_proportion_deviation =
      std::max(max_gap(report.entity_counts.data(), report.corpus_entity_counts.data(), kNumEntityTypes),
               max_gap(report.relation_counts.data(), report.corpus_relation_counts.data(),
                       kNumRelationTypes));
  return report;
}

std::string selection_to_json(const SelectionReport& report) {
  auto type_counts = [](const auto& counts, const auto& all) {
    ordered_json out;
    for (std::size_t i = 0; i < all.size(); ++i) out[std::string(to_string(all[i]))] = counts[i];
    return out;
  };
  ordered_json doc;
  doc["corpus_size"] = report.corpus_size;
  doc["size"] = report.size;
  doc["seed"] = report.seed;
  doc["max_proportion_deviation"] = report.max_proportion_deviation;
  doc["max_cell_count_deviation"] = report.max_cell_count_deviation;
  doc["entity_counts"] = type_counts(report.entity_counts, kAllEntityTypes);
  doc["relation_counts"] = type_counts(report.relation_counts, kAllRelationTypes);
  doc["corpus_entity_counts"] = type_counts(report.corpus_entity_counts, kAllEntityTypes);
  doc["corpus_relation_counts"] = type_counts(report.corpus_relation_counts, kAllRelationTypes);
  doc["difficulty_buckets"] = ordered_json::array();
  for (std::size_t b = 0; b < report.difficulty_buckets.size(); ++b) {
    ordered_json row;
    row["min_difficulty"] = report.difficulty_buckets[b].min_difficulty;
    row["max_difficulty"] = report.difficulty_buckets[b].max_difficulty;
    row["chosen"] = report.bucket_counts[b];
    doc["difficulty_buckets"].push_back(row);
  }
  doc["cells"] = ordered_json::array();
  for (const auto& c : report.cells) {
    ordered_json row;
    row["entity_type"] = c.entity_type;
    row["bucket"] = c.bucket;
    row["available"] = c.available;
    row["quota"] = c.quota;
    doc["cells"].push_back(row);
  }
  doc["chosen_ids"] = report.chosen_ids;
  return doc.dump();
}

}  // namespace sciex
