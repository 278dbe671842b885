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


#include "synthetic.hpp"

#include <cstdio>
#include <set>
#include <string>
#include <tuple>

#include "sciex/sampling.hpp"

namespace sciex::testing {

namespace {

std::string surface(EntityType t, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%05zu",
                t == EntityType::kDataset ? "dataset" : t == EntityType::kTask ? "task" : "method", n);
  return buf;
}

}  // namespace

std::vector<ExtractionRecord> synthetic_split(const SplitTable& table, std::size_t n_records,
                                              std::uint64_t seed) {
  if (n_records == 0) n_records = std::max<std::size_t>(1, table.entity_total / 3);
  SeededRng rng(seed);

  std::vector<EntityType> entity_types;
  for (std::size_t i = 0; i < kNumEntityTypes; ++i) {
    entity_types.insert(entity_types.end(), table.entities[i], kAllEntityTypes[i]);
  }
  rng.shuffle(entity_types);
  std::vector<std::vector<EntityMention>> ents(n_records);
  std::array<std::size_t, kNumEntityTypes> next_name{};
  for (EntityType t : entity_types) {
    const auto r = static_cast<std::size_t>(rng.below(n_records));
    ents[r].push_back({surface(t, next_name[static_cast<std::size_t>(t)]++), t});
  }

  std::vector<std::size_t> pairable;
  for (std::size_t r = 0; r < n_records; ++r) {
    if (ents[r].size() >= 2) pairable.push_back(r);
  }
  std::vector<RelationType> relation_types;
  for (std::size_t i = 0; i < kNumRelationTypes; ++i) {
    relation_types.insert(relation_types.end(), table.relations[i], kAllRelationTypes[i]);
  }
  rng.shuffle(relation_types);
  std::vector<std::vector<RelationTriple>> rels(n_records);
  std::set<std::tuple<std::size_t, std::size_t, int, std::size_t>> used;
  for (RelationType t : relation_types) {
    while (true) {
      const std::size_t r = pairable[static_cast<std::size_t>(rng.below(pairable.size()))];
      const auto s = static_cast<std::size_t>(rng.below(ents[r].size()));
      const auto o = static_cast<std::size_t>(rng.below(ents[r].size()));
      if (s == o || !used.emplace(r, s, static_cast<int>(t), o).second) continue;
      rels[r].push_back({ents[r][s].surface, t, ents[r][o].surface, std::nullopt, std::nullopt});
      break;
    }
  }

  std::vector<ExtractionRecord> out;
  out.reserve(n_records);
  for (std::size_t r = 0; r < n_records; ++r) {
    char id[32];
    std::snprintf(id, sizeof id, "%s-%06zu", std::string(table.name).c_str(), r);
    std::string sentence = "We study";
    for (std::size_t i = 0; i < ents[r].size(); ++i) {
      sentence += i == 0 ? " " : " and ";
      sentence += ents[r][i].surface;
    }
    if (ents[r].empty()) sentence += " related work";
    sentence += " .";
    ExtractionRecord record(id, sentence);
    for (auto& e : ents[r]) record.add_entity(e);
    for (auto& t : rels[r]) record.add_relation(t);
    out.push_back(record.with_resolved_types());
  }
  return out;
}

ExtractionRecord random_small_record(std::uint64_t seed, std::size_t max_entities,
                                     std::size_t max_relations) {
  static const char* const kWords[] = {"BERT", "bert", "CRF", "SQuAD", "NER", "LSTM"};
  SeededRng rng(seed);
  ExtractionRecord record("r" + std::to_string(seed), "BERT bert CRF SQuAD NER LSTM");
  const auto n_ent = static_cast<std::size_t>(rng.below(max_entities + 1));
  for (std::size_t i = 0; i < n_ent; ++i) {
    record.add_entity({kWords[rng.below(6)], kAllEntityTypes[rng.below(kNumEntityTypes)]});
  }
  const auto n_rel = static_cast<std::size_t>(rng.below(max_relations + 1));
  for (std::size_t i = 0; i < n_rel; ++i) {
    record.add_relation({kWords[rng.below(6)], kAllRelationTypes[rng.below(3)], kWords[rng.below(6)],
                         std::nullopt, std::nullopt});
  }
  return record;
}

}  // namespace sciex::testing
