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

#include "sciex/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sciex/error.hpp"

namespace sciex {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string where(std::size_t line_no) {
  return line_no ? "line " + std::to_string(line_no) + ": " : std::string();
}

const std::string& string_member(const json& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw SchemaError(where(line_no) + "field \"" + key + "\" must be a string");
  }
  return it->get_ref<const std::string&>();
}

}  // namespace

ExtractionRecord parse_record_line(std::string_view line, std::size_t line_no) {
  json doc = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw SchemaError(where(line_no) + "not valid JSON");
  if (!doc.is_object()) throw SchemaError(where(line_no) + "expected a JSON object");

  ExtractionRecord record(string_member(doc, "id", line_no), string_member(doc, "sentence", line_no));

  auto array_member = [&](const char* key) -> const json* {
    auto it = doc.find(key);
    if (it == doc.end()) return nullptr;
    if (!it->is_array()) throw SchemaError(where(line_no) + "field \"" + key + "\" must be an array");
    return &*it;
  };
  auto strings = [](const json& item, std::size_t n) {
    if (!item.is_array() || item.size() != n) return false;
    for (const json& x : item) {
      if (!x.is_string()) return false;
    }
    return true;
  };

  try {
    if (const json* ner = array_member("ner")) {
      for (const json& item : *ner) {
        if (!strings(item, 2)) {
          throw SchemaError("\"ner\" items must be [surface, type] string pairs");
        }
        record.add_entity({item[0].get<std::string>(),
                           entity_type_from_string(item[1].get_ref<const std::string&>())});
      }
    }
    if (const json* rel = array_member("rel")) {
      for (const json& item : *rel) {
        if (!strings(item, 3)) {
          throw SchemaError("\"rel\" items must be [subject, relation, object] string triples");
        }
        record.add_relation({item[0].get<std::string>(),
                             relation_type_from_string(item[1].get_ref<const std::string&>()),
                             item[2].get<std::string>(), std::nullopt, std::nullopt});
      }
    }
  } catch (const TypeError& e) {
    throw TypeError(where(line_no) + e.detail());
  } catch (const SchemaError& e) {
    if (line_no == 0) throw;
    throw SchemaError(where(line_no) + e.detail());
  }

  auto problems = validate_gold(record);
  if (!problems.empty()) throw SchemaError(where(line_no) + problems.front());
  return record.with_resolved_types();
}

std::string record_to_line(const ExtractionRecord& record) {
  ordered_json doc;
  doc["id"] = record.id();
  doc["sentence"] = record.sentence();
  doc["ner"] = ordered_json::array();
  for (const auto& e : record.entities()) {
    doc["ner"].push_back({e.surface, std::string(to_string(e.type))});
  }
  doc["rel"] = ordered_json::array();
  for (const auto& r : record.relations()) {
    doc["rel"].push_back({r.subject, std::string(to_string(r.relation)), r.object});
  }
  return doc.dump();
}

std::vector<ExtractionRecord> parse_dataset(std::string_view text) {
  std::vector<ExtractionRecord> records;
  std::vector<std::string> failures;
  std::optional<ErrorCode> first_code;
  std::set<std::string> ids;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      ExtractionRecord r = parse_record_line(line, line_no);
      if (!ids.insert(r.id()).second) {
        throw SchemaError(where(line_no) + "duplicate record id '" + r.id() + "'");
      }
      records.push_back(std::move(r));
    } catch (const Error& e) {
      if (!first_code) first_code = e.code();
      failures.emplace_back(e.what());
    }
  }

  if (!failures.empty()) {
    std::string message = std::to_string(failures.size()) + " malformed line(s)";
    for (const auto& f : failures) message += "\n  " + f;
    throw Error(*first_code, message);
  }
  return records;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<ExtractionRecord> load_dataset(const std::string& path, const std::string& split) {
  std::string file = path;
  if (std::filesystem::is_directory(path)) {
    if (split.empty()) throw IoError("'" + path + "' is a directory; a split name is required");
    file = (std::filesystem::path(path) / (split + ".jsonl")).string();
  }
  return parse_dataset(read_file(file));
}

void save_dataset(const std::string& path, const std::vector<ExtractionRecord>& records) {
  std::string text;
  for (const auto& r : records) {
    text += record_to_line(r);
    text += '\n';
  }
  write_file(path, text);
}

std::size_t DatasetStats::entity_total() const {
  return std::accumulate(entities.begin(), entities.end(), std::size_t{0});
}

std::size_t DatasetStats::relation_total() const {
  return std::accumulate(relations.begin(), relations.end(), std::size_t{0});
}

DatasetStats compute_stats(const std::vector<ExtractionRecord>& records) {
  DatasetStats s;
  s.n_records = records.size();
  for (const auto& r : records) {
    for (const auto& e : r.entities()) ++s.entities[static_cast<std::size_t>(e.type)];
    for (const auto& t : r.relations()) ++s.relations[static_cast<std::size_t>(t.relation)];
  }
  return s;
}

std::string stats_to_json(const DatasetStats& stats) {
  ordered_json doc;
  doc["n_records"] = stats.n_records;
  ordered_json ents, rels;
  for (EntityType t : kAllEntityTypes) {
    ents[std::string(to_string(t))] = stats.entities[static_cast<std::size_t>(t)];
  }
  ents["total"] = stats.entity_total();
  for (RelationType t : kAllRelationTypes) {
    rels[std::string(to_string(t))] = stats.relations[static_cast<std::size_t>(t)];
  }
  rels["total"] = stats.relation_total();
  doc["entities"] = ents;
  doc["relations"] = rels;
  return doc.dump(2);
}

DatasetStats stats_from_json(std::string_view json_text) {
  json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) throw SchemaError("stats: not a JSON object");
  try {
    DatasetStats s;
    s.n_records = doc.at("n_records").get<std::size_t>();
    for (EntityType t : kAllEntityTypes) {
      s.entities[static_cast<std::size_t>(t)] =
          doc.at("entities").at(std::string(to_string(t))).get<std::size_t>();
    }
    for (RelationType t : kAllRelationTypes) {
      s.relations[static_cast<std::size_t>(t)] =
          doc.at("relations").at(std::string(to_string(t))).get<std::size_t>();
    }
    return s;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("stats: ") + e.what());
  }
}

std::string format_stats_table(const DatasetStats& stats) {
  std::ostringstream out;
  auto row = [&](std::string_view name, std::size_t n) {
    std::string label(name);
    label.resize(std::max<std::size_t>(label.size(), 16), ' ');
    out << "  " << label << n << '\n';
  };
  out << "records: " << stats.n_records << '\n';
  out << "entity types\n";
  for (EntityType t : kAllEntityTypes) row(to_string(t), stats.entities[static_cast<std::size_t>(t)]);
  row("Total", stats.entity_total());
  out << "relation types\n";
  for (RelationType t : kAllRelationTypes) {
    row(to_string(t), stats.relations[static_cast<std::size_t>(t)]);
  }
  row("Total", stats.relation_total());
  return out.str();
}

}  // namespace sciex
