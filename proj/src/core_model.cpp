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

#include "sciex/core_model.hpp"

#include <algorithm>

#include "sciex/error.hpp"

namespace sciex {

namespace {

constexpr std::array<std::string_view, kNumEntityTypes> kEntityNames = {"Dataset", "Task",
                                                                        "Method"};
constexpr std::array<std::string_view, kNumRelationTypes> kRelationNames = {
    "Part-Of",        "SubClass-Of", "SubTask-Of", "Benchmark-For", "Trained-With",
    "Evaluated-With", "Synonym-Of",  "Used-For",   "Compare-With"};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (lower(a[i]) != lower(b[i])) return false;
  }
  return true;
}

template <typename Enum, std::size_t N>
std::optional<Enum> parse_enum(const std::array<std::string_view, N>& names, std::string_view s,
                               bool exact) {
  for (std::size_t i = 0; i < N; ++i) {
    if (exact ? names[i] == s : iequals(names[i], s)) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(EntityType t) { return kEntityNames[static_cast<std::size_t>(t)]; }
std::string_view to_string(RelationType t) { return kRelationNames[static_cast<std::size_t>(t)]; }

std::optional<EntityType> parse_entity_type(std::string_view s, bool exact) {
  return parse_enum<EntityType>(kEntityNames, s, exact);
}

std::optional<RelationType> parse_relation_type(std::string_view s, bool exact) {
  return parse_enum<RelationType>(kRelationNames, s, exact);
}

EntityType entity_type_from_string(std::string_view s) {
  if (auto t = parse_entity_type(s)) return *t;
  throw TypeError("unknown entity type '" + std::string(s) + "'");
}

RelationType relation_type_from_string(std::string_view s) {
  if (auto t = parse_relation_type(s)) return *t;
  throw TypeError("unknown relation type '" + std::string(s) + "'");
}

std::string normalize_span(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) words.emplace_back(s.substr(start, i - start));
  }
  return words;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

std::string match_key(std::string_view surface, const MatchOptions& opts) {
  std::string key = normalize_span(surface);
  return opts.case_sensitive ? key : ascii_lower(key);
}

bool ExtractionRecord::add_entity(EntityMention m) {
  m.surface = normalize_span(m.surface);
  if (m.surface.empty()) throw SchemaError("empty entity surface in record '" + id_ + "'");
  if (std::find(entities_.begin(), entities_.end(), m) != entities_.end()) return false;
  entities_.push_back(std::move(m));
  return true;
}

bool ExtractionRecord::add_relation(RelationTriple t) {
  t.subject = normalize_span(t.subject);
  t.object = normalize_span(t.object);
  if (t.subject.empty() || t.object.empty()) {
    throw SchemaError("empty relation argument in record '" + id_ + "'");
  }
  auto same = [&](const RelationTriple& r) {
    return r.subject == t.subject && r.relation == t.relation && r.object == t.object;
  };
  if (std::any_of(relations_.begin(), relations_.end(), same)) return false;
  relations_.push_back(std::move(t));
  return true;
}

std::optional<EntityType> ExtractionRecord::lookup_type(std::string_view surface,
                                                        const MatchOptions& opts) const {
  const std::string key = match_key(surface, opts);
  for (const auto& e : entities_) {
    if (match_key(e.surface, opts) == key) return e.type;
  }
  return std::nullopt;
}

ExtractionRecord ExtractionRecord::with_resolved_types(const MatchOptions& opts) const {
  ExtractionRecord out = *this;
  for (auto& t : out.relations_) {
    if (!t.subject_type) t.subject_type = lookup_type(t.subject, opts);
    if (!t.object_type) t.object_type = lookup_type(t.object, opts);
  }
  return out;
}

RawExtraction to_raw(const ExtractionRecord& record) {
  RawExtraction raw;
  for (const auto& e : record.entities()) {
    raw.ner.push_back({e.surface, std::string(to_string(e.type))});
  }
  for (const auto& r : record.relations()) {
    raw.rel.push_back({r.subject, std::string(to_string(r.relation)), r.object});
  }
  return raw;
}

ConstraintVerdict check_constraints(const RawExtraction& pred, const ExtractionRecord& source,
                                    const MatchOptions& opts) {
  ConstraintVerdict v;
  const std::string sentence = match_key(source.sentence(), opts);
  auto grounded = [&](const std::string& surface) {
    const std::string key = match_key(surface, opts);
    return !key.empty() && sentence.find(key) != std::string::npos;
  };
  auto schema_fail = [&](std::string why) {
    v.schema_ok = false;
    v.violations.push_back(std::move(why));
  };
  auto factual_fail = [&](std::string why) {
    v.factual_ok = false;
    v.violations.push_back(std::move(why));
  };

  for (const auto& [surface, type] : pred.ner) {
    if (normalize_span(surface).empty()) schema_fail("entity with empty surface");
    if (!parse_entity_type(type)) schema_fail("unknown entity type '" + type + "'");
    if (!normalize_span(surface).empty() && !grounded(surface)) {
      factual_fail("entity '" + surface + "' not found in sentence");
    }
  }
  for (const auto& [subject, relation, object] : pred.rel) {
    if (!parse_relation_type(relation)) schema_fail("unknown relation type '" + relation + "'");
    for (const std::string* arg : {&subject, &object}) {
      if (normalize_span(*arg).empty()) {
        schema_fail("relation with empty argument");
      } else if (!grounded(*arg)) {
        factual_fail("relation argument '" + *arg + "' not found in sentence");
      }
    }
  }
  return v;
}

ConstraintVerdict check_constraints(const ExtractionRecord& pred, const ExtractionRecord& source,
                                    const MatchOptions& opts) {
  return check_constraints(to_raw(pred), source, opts);
}

std::vector<std::string> validate_gold(const ExtractionRecord& record) {
  std::vector<std::string> problems;
  const std::string sentence = normalize_span(record.sentence());
  for (const auto& e : record.entities()) {
    if (sentence.find(e.surface) == std::string::npos) {
      problems.push_back("entity '" + e.surface + "' does not occur in the sentence");
    }
  }
  for (const auto& r : record.relations()) {
    for (const std::string* arg : {&r.subject, &r.object}) {
      if (!record.lookup_type(*arg)) {
        problems.push_back("relation argument '" + *arg + "' is not an entity of the record");
      }
    }
  }
  return problems;
}

}  // namespace sciex
