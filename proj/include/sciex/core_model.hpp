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

// Domain types for scientific entity/relation extraction and the schema and
// factual constraint checks applied to predictions.

#ifndef SCIEX_CORE_MODEL_HPP_
#define SCIEX_CORE_MODEL_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sciex {

enum class EntityType { kDataset = 0, kTask = 1, kMethod = 2 };
inline constexpr std::size_t kNumEntityTypes = 3;
inline constexpr std::array<EntityType, kNumEntityTypes> kAllEntityTypes = {
    EntityType::kDataset, EntityType::kTask, EntityType::kMethod};

// Order follows the relation list given to the model in the task prompt.
enum class RelationType {
  kPartOf = 0,
  kSubClassOf,
  kSubTaskOf,
  kBenchmarkFor,
  kTrainedWith,
  kEvaluatedWith,
  kSynonymOf,
  kUsedFor,
  kCompareWith,
};
inline constexpr std::size_t kNumRelationTypes = 9;
inline constexpr std::array<RelationType, kNumRelationTypes> kAllRelationTypes = {
    RelationType::kPartOf,        RelationType::kSubClassOf,   RelationType::kSubTaskOf,
    RelationType::kBenchmarkFor,  RelationType::kTrainedWith,  RelationType::kEvaluatedWith,
    RelationType::kSynonymOf,     RelationType::kUsedFor,      RelationType::kCompareWith};

// Canonical spellings: "Dataset", "Task", "Method", "Part-Of", ...
std::string_view to_string(EntityType t);
std::string_view to_string(RelationType t);

// Exact-spelling parse when `exact` is true; otherwise ASCII case-insensitive
// (the published statistics use "DATASET", "PART-OF", ...).
std::optional<EntityType> parse_entity_type(std::string_view s, bool exact = false);
std::optional<RelationType> parse_relation_type(std::string_view s, bool exact = false);

// Throwing variants; TypeError names the offending string.
EntityType entity_type_from_string(std::string_view s);
RelationType relation_type_from_string(std::string_view s);

// Trims and collapses whitespace runs to one space. Case and determiners are
// left untouched.
std::string normalize_span(std::string_view raw);

// Whitespace-delimited words.
std::vector<std::string> split_words(std::string_view s);

std::string ascii_lower(std::string_view s);

struct MatchOptions {
  bool case_sensitive = true;
};

// Comparison key for a surface under `opts`.
std::string match_key(std::string_view surface, const MatchOptions& opts = {});

struct EntityMention {
  std::string surface;
  EntityType type = EntityType::kMethod;

  friend bool operator==(const EntityMention&, const EntityMention&) = default;
};

struct RelationTriple {
  std::string subject;
  RelationType relation = RelationType::kUsedFor;
  std::string object;
  std::optional<EntityType> subject_type;
  std::optional<EntityType> object_type;

  friend bool operator==(const RelationTriple&, const RelationTriple&) = default;
};

// One sentence with its (gold or predicted) annotations. Entities and
// relations have set semantics: adding a duplicate is a no-op, and insertion
// order of first occurrences is kept. Surfaces are stored normalized.
class ExtractionRecord {
 public:
  ExtractionRecord() = default;
  ExtractionRecord(std::string id, std::string sentence)
      : id_(std::move(id)), sentence_(std::move(sentence)) {}

  const std::string& id() const { return id_; }
  const std::string& sentence() const { return sentence_; }
  const std::vector<EntityMention>& entities() const { return entities_; }
  const std::vector<RelationTriple>& relations() const { return relations_; }

  // Returns false when an equal (surface, type) pair is already present.
  // Throws SchemaError if the surface is empty after normalization.
  bool add_entity(EntityMention m);

  // Duplicates are detected on (subject, relation, object).
  bool add_relation(RelationTriple t);

  // Type of the first entity whose surface equals `surface`.
  std::optional<EntityType> lookup_type(std::string_view surface,
                                        const MatchOptions& opts = {}) const;

  // Copy whose triples have missing argument types filled from the entity
  // list. Stored types win over the lookup.
  ExtractionRecord with_resolved_types(const MatchOptions& opts = {}) const;

  // Same id/sentence, annotations dropped.
  ExtractionRecord stripped() const { return ExtractionRecord(id_, sentence_); }

  friend bool operator==(const ExtractionRecord&, const ExtractionRecord&) = default;

 private:
  std::string id_;
  std::string sentence_;
  std::vector<EntityMention> entities_;
  std::vector<RelationTriple> relations_;
};

// Untyped prediction payload as written by a model: [entity, type] pairs and
// [subject, relation, object] triples, before enum validation.
struct RawExtraction {
  std::vector<std::array<std::string, 2>> ner;
  std::vector<std::array<std::string, 3>> rel;
};

RawExtraction to_raw(const ExtractionRecord& record);

struct ConstraintVerdict {
  bool schema_ok = true;
  bool factual_ok = true;
  std::vector<std::string> violations;

  bool ok() const { return schema_ok && factual_ok; }
};

// Schema: every type string parses into its closed enum and every item has
// non-empty arguments. Factual: every entity surface and relation argument is
// a substring of the normalized source sentence.
ConstraintVerdict check_constraints(const RawExtraction& pred, const ExtractionRecord& source,
                                    const MatchOptions& opts = {});
ConstraintVerdict check_constraints(const ExtractionRecord& pred, const ExtractionRecord& source,
                                    const MatchOptions& opts = {});

// Gold-record invariants: every entity surface occurs in the sentence and every
// relation argument names an entity of the record. Returns the violations.
std::vector<std::string> validate_gold(const ExtractionRecord& record);

}  // namespace sciex

#endif  // SCIEX_CORE_MODEL_HPP_
