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

#include "sciex/output_parser.hpp"

#include <array>

#include "json.hpp"
#include "sciex/error.hpp"

namespace sciex {

namespace {

using json = nlohmann::json;

constexpr std::size_t npos = std::string_view::npos;

struct TagScan {
  std::string open;
  std::string close;
  std::size_t open_count = 0;
  std::size_t close_count = 0;
  // Outermost pair: first opening tag and the close that balances it. When
  // nesting never balances, the last closing tag is used.
  std::size_t open_pos = npos;
  std::size_t close_pos = npos;

  bool found() const { return open_pos != npos && close_pos != npos; }
  std::size_t content_begin() const { return open_pos + open.size(); }
  std::size_t end() const { return close_pos + close.size(); }
};

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t p = text.find(needle); p != npos; p = text.find(needle, p + needle.size())) {
    ++n;
  }
  return n;
}

TagScan scan_tag(std::string_view text, std::string_view name) {
  TagScan s;
  s.open = "<" + std::string(name) + ">";
  s.close = "</" + std::string(name) + ">";
  s.open_count = count_occurrences(text, s.open);
  s.close_count = count_occurrences(text, s.close);
  s.open_pos = text.find(s.open);
  if (s.open_pos == npos) return s;

  int depth = 1;
  std::size_t p = s.open_pos + s.open.size();
  while (p < text.size()) {
    std::size_t next_open = text.find(s.open, p);
    std::size_t next_close = text.find(s.close, p);
    if (next_close == npos) break;
    if (next_open != npos && next_open < next_close) {
      ++depth;
      p = next_open + s.open.size();
      continue;
    }
    if (--depth == 0) {
      s.close_pos = next_close;
      return s;
    }
    p = next_close + s.close.size();
  }
  std::size_t last = text.rfind(s.close);
  if (last != npos && last > s.open_pos) s.close_pos = last;
  return s;
}

std::string_view content(std::string_view text, const TagScan& s) {
  if (!s.found()) return {};
  return text.substr(s.content_begin(), s.close_pos - s.content_begin());
}

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n\f\v");
  if (b == npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(b, e - b + 1));
}

// End (exclusive) of the JSON object starting at text[begin] == '{', honouring
// string literals. npos when unbalanced.
std::size_t match_object(std::string_view text, std::size_t begin) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = begin; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return npos;
}

bool is_answer_object(const json& j) {
  return j.is_object() && (j.contains("ner") || j.contains("rel"));
}

std::optional<json> find_answer_object(std::string_view text) {
  for (std::size_t p = text.find('{'); p != npos; p = text.find('{', p + 1)) {
    std::size_t end = match_object(text, p);
    if (end == npos) continue;
    json j = json::parse(text.substr(p, end - p), nullptr, /*allow_exceptions=*/false);
    if (!j.is_discarded() && is_answer_object(j)) return j;
  }
  return std::nullopt;
}

struct PayloadResult {
  ExtractionRecord extraction;
  std::size_t dropped = 0;
};

const json* first_string_field(const json& obj, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    auto it = obj.find(k);
    if (it != obj.end() && it->is_string()) return &*it;
  }
  return nullptr;
}

// Lenient conversion: anything that cannot be typed is dropped and counted.
PayloadResult convert_lenient(const json& payload, const ExtractionRecord& source) {
  PayloadResult out{source.stripped(), 0};

  if (auto it = payload.find("ner"); it != payload.end()) {
    if (!it->is_array()) {
      ++out.dropped;
    } else {
      for (const json& item : *it) {
        const json* surface = nullptr;
        const json* type = nullptr;
        if (item.is_array() && item.size() >= 2 && item[0].is_string() && item[1].is_string()) {
          surface = &item[0];
          type = &item[1];
        } else if (item.is_object()) {
          surface = first_string_field(item, {"entity", "text", "span"});
          type = first_string_field(item, {"type", "label"});
        }
        std::optional<EntityType> t;
        if (type) t = parse_entity_type(type->get_ref<const std::string&>());
        if (!surface || !t || normalize_span(surface->get_ref<const std::string&>()).empty()) {
          ++out.dropped;
          continue;
        }
        out.extraction.add_entity({surface->get<std::string>(), *t});
      }
    }
  }

  if (auto it = payload.find("rel"); it != payload.end()) {
    if (!it->is_array()) {
      ++out.dropped;
    } else {
      for (const json& item : *it) {
        const json* subject = nullptr;
        const json* relation = nullptr;
        const json* object = nullptr;
        if (item.is_array() && item.size() >= 3 && item[0].is_string() && item[1].is_string() &&
            item[2].is_string()) {
          subject = &item[0];
          relation = &item[1];
          object = &item[2];
        } else if (item.is_object()) {
          subject = first_string_field(item, {"subject", "head"});
          relation = first_string_field(item, {"relation", "type"});
          object = first_string_field(item, {"object", "tail"});
        }
        std::optional<RelationType> r;
        if (relation) r = parse_relation_type(relation->get_ref<const std::string&>());
        if (!subject || !object || !r ||
            normalize_span(subject->get_ref<const std::string&>()).empty() ||
            normalize_span(object->get_ref<const std::string&>()).empty()) {
          ++out.dropped;
          continue;
        }
        out.extraction.add_relation({subject->get<std::string>(), *r, object->get<std::string>(),
                                     std::nullopt, std::nullopt});
      }
    }
  }
  return out;
}

// Strict payload: the whole block is one object with only "ner"/"rel" array
// members, items are arrays of strings with canonical type names.
ExtractionRecord convert_strict(std::string_view block, const ExtractionRecord& source) {
  const std::string text = trim(block);
  json payload = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (payload.is_discarded()) throw ParseError("answer payload is not valid JSON");
  if (!payload.is_object()) throw ParseError("answer payload is not a JSON object");
  if (!is_answer_object(payload)) throw ParseError("answer payload has neither \"ner\" nor \"rel\"");
  for (const auto& [key, value] : payload.items()) {
    if (key != "ner" && key != "rel") throw ParseError("answer payload has unexpected key '" + key + "'");
    if (!value.is_array()) throw ParseError("answer payload \"" + key + "\" is not an array");
  }

  ExtractionRecord out = source.stripped();
  auto all_strings = [](const json& item, std::size_t n) {
    if (!item.is_array() || item.size() != n) return false;
    for (const json& x : item) {
      if (!x.is_string()) return false;
    }
    return true;
  };
  if (payload.contains("ner")) {
    for (const json& item : payload["ner"]) {
      if (!all_strings(item, 2)) throw ParseError("\"ner\" item is not an [entity, type] pair");
      const auto& type = item[1].get_ref<const std::string&>();
      auto t = parse_entity_type(type, /*exact=*/true);
      if (!t) throw ParseError("unknown entity type '" + type + "'");
      if (normalize_span(item[0].get_ref<const std::string&>()).empty()) {
        throw ParseError("empty entity surface");
      }
      out.add_entity({item[0].get<std::string>(), *t});
    }
  }
  if (payload.contains("rel")) {
    for (const json& item : payload["rel"]) {
      if (!all_strings(item, 3)) {
        throw ParseError("\"rel\" item is not a [subject, relation, object] triple");
      }
      const auto& relation = item[1].get_ref<const std::string&>();
      auto r = parse_relation_type(relation, /*exact=*/true);
      if (!r) throw ParseError("unknown relation type '" + relation + "'");
      if (normalize_span(item[0].get_ref<const std::string&>()).empty() ||
          normalize_span(item[2].get_ref<const std::string&>()).empty()) {
        throw ParseError("empty relation argument");
      }
      out.add_relation({item[0].get<std::string>(), *r, item[2].get<std::string>(), std::nullopt,
                        std::nullopt});
    }
  }
  return out;
}

struct Blocks {
  TagScan reasoning;
  TagScan think;
  TagScan answer;
};

bool in_order(const Blocks& b) {
  std::array<const TagScan*, 3> order = {&b.reasoning, &b.think, &b.answer};
  std::size_t last_end = 0;
  for (const TagScan* s : order) {
    if (!s->found()) continue;
    if (s->open_pos < last_end) return false;
    last_end = s->end();
  }
  return true;
}

// Throws ParseError on the first violated strict rule.
ExtractionRecord strict_parse(std::string_view raw, const Blocks& b, const ExtractionRecord& source) {
  if (!b.reasoning.found()) throw ParseError("missing reasoning block");
  if (!b.answer.found()) throw ParseError("missing answer block");
  for (const TagScan* s : {&b.reasoning, &b.think, &b.answer}) {
    if (s->open_count > 1 || s->close_count > 1) {
      throw ParseError("repeated or nested " + s->open + " block");
    }
  }
  if (b.think.open_count != b.think.close_count || (b.think.open_count == 1 && !b.think.found())) {
    throw ParseError("unterminated think block");
  }
  if (!in_order(b)) throw ParseError("blocks out of order");
  return convert_strict(content(raw, b.answer), source);
}

}  // namespace

std::string_view to_string(ParseMode mode) {
  return mode == ParseMode::kStrict ? "strict" : "lenient";
}

ParseMode parse_mode_from_string(std::string_view s) {
  if (s == "strict") return ParseMode::kStrict;
  if (s == "lenient") return ParseMode::kLenient;
  throw Error(ErrorCode::kInvalidArgument, "unknown parse mode '" + std::string(s) + "'");
}

ParsedCompletion parse_completion(std::string_view raw, const ExtractionRecord& source,
                                  ParseMode mode) {
  Blocks b{scan_tag(raw, "reasoning"), scan_tag(raw, "think"), scan_tag(raw, "answer")};

  ParsedCompletion out;
  out.reasoning = std::string(content(raw, b.reasoning));
  out.think = std::string(content(raw, b.think));
  out.answer_raw = std::string(content(raw, b.answer));
  out.format.has_reasoning = b.reasoning.found();
  out.format.has_think = b.think.found();
  out.format.has_answer = b.answer.found();
  out.format.blocks_in_order = in_order(b);

  std::optional<ExtractionRecord> strict_result;
  try {
    strict_result = strict_parse(raw, b, source);
    out.format.strict_ok = true;
  } catch (const ParseError& e) {
    out.format.strict_violation = e.what();
    if (mode == ParseMode::kStrict) throw;
  }

  if (mode == ParseMode::kStrict) {
    out.extraction = std::move(strict_result);
    out.format.answer_parses = true;
    return out;
  }

  std::optional<json> payload;
  if (b.answer.found()) payload = find_answer_object(out.answer_raw);
  if (!payload) payload = find_answer_object(raw);
  if (payload) {
    PayloadResult converted = convert_lenient(*payload, source);
    out.extraction = std::move(converted.extraction);
    out.format.dropped_items = converted.dropped;
    out.format.answer_parses = true;
  }
  return out;
}

ReasoningTemplate ReasoningTemplate::standard() {
  return ReasoningTemplate{{
      "1. Identify candidate entity spans and their types ({entity_types}): {entity_count} found.",
      "2. Consider pairwise relations among identified entities against the relation definitions "
      "({relation_types}): {relation_count} found.",
      "3. Formulate the final extraction.",
  }};
}

std::string ReasoningTemplate::render(const ExtractionRecord& record) const {
  auto join = [](auto const& all) {
    std::string s;
    for (auto t : all) {
      if (!s.empty()) s += ", ";
      s += to_string(t);
    }
    return s;
  };
  const std::array<std::pair<std::string, std::string>, 4> slots = {{
      {"{entity_types}", join(kAllEntityTypes)},
      {"{relation_types}", join(kAllRelationTypes)},
      {"{entity_count}", std::to_string(record.entities().size())},
      {"{relation_count}", std::to_string(record.relations().size())},
  }};

  std::string out;
  for (const std::string& step : steps) {
    std::string line = step;
    for (const auto& [slot, value] : slots) {
      for (std::size_t p = line.find(slot); p != std::string::npos;
           p = line.find(slot, p + value.size())) {
        line.replace(p, slot.size(), value);
      }
    }
    out += line;
    out += '\n';
  }
  return out;
}

std::string render_answer(const ExtractionRecord& record, bool include_ner, bool include_rel) {
  auto quoted = [](const std::string& s) { return json(s).dump(); };
  std::string out = "{";
  if (include_ner) {
    out += "\"ner\": [";
    bool first = true;
    for (const auto& e : record.entities()) {
      if (!first) out += ", ";
      first = false;
      out += "[" + quoted(e.surface) + ", " + quoted(std::string(to_string(e.type))) + "]";
    }
    out += "]";
  }
  if (include_rel) {
    if (include_ner) out += ", ";
    out += "\"rel\": [";
    bool first = true;
    for (const auto& r : record.relations()) {
      if (!first) out += ", ";
      first = false;
      out += "[" + quoted(r.subject) + ", " + quoted(std::string(to_string(r.relation))) + ", " +
             quoted(r.object) + "]";
    }
    out += "]";
  }
  out += "}";
  return out;
}

std::string render_target(const ExtractionRecord& record, const ReasoningTemplate& tmpl,
                          bool include_ner, bool include_rel) {
  return "<reasoning>\n" + tmpl.render(record) + "</reasoning>\n<answer>\n" +
         render_answer(record, include_ner, include_rel) + "\n</answer>";
}

}  // namespace sciex
