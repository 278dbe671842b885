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


#include "sciex/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "sciex/dataset.hpp"
#include "sciex/error.hpp"

namespace sciex {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct Line {
  std::size_t number;
  std::string_view text;
};

// Non-blank lines with their 1-based numbers.
std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t pos = 0;
  std::size_t number = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++number;
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    lines.push_back({number, line});
  }
  return lines;
}

std::string at_line(std::size_t n, const std::string& message) {
  return "line " + std::to_string(n) + ": " + message;
}

std::string fixed(double v, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

ordered_json error_json(const std::exception& e) {
  ordered_json err;
  if (const auto* se = dynamic_cast<const Error*>(&e)) {
    err["code"] = error_code_name(se->code());
    err["message"] = se->detail();
  } else {
    err["code"] = error_code_name(ErrorCode::kInternal);
    err["message"] = e.what();
  }
  return err;
}

ordered_json extraction_json(const ExtractionRecord& r) {
  ordered_json out;
  out["ner"] = ordered_json::array();
  for (const auto& e : r.entities()) out["ner"].push_back({e.surface, std::string(to_string(e.type))});
  out["rel"] = ordered_json::array();
  for (const auto& t : r.relations()) {
    out["rel"].push_back({t.subject, std::string(to_string(t.relation)), t.object});
  }
  return out;
}

ordered_json format_json(const FormatReport& f) {
  ordered_json out;
  out["has_reasoning"] = f.has_reasoning;
  out["has_think"] = f.has_think;
  out["has_answer"] = f.has_answer;
  out["answer_parses"] = f.answer_parses;
  out["blocks_in_order"] = f.blocks_in_order;
  out["dropped_items"] = f.dropped_items;
  out["strict_ok"] = f.strict_ok;
  out["strict_violation"] = f.strict_violation;
  return out;
}

template <typename T>
T member(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(std::string("missing field \"") + key + "\"");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw SchemaError(std::string("field \"") + key + "\" has the wrong type");
  }
}

std::int64_t sample_index_of(const json& obj) {
  auto it = obj.find("sample_index");
  if (it == obj.end()) return 0;
  if (!it->is_number_integer()) throw SchemaError("field \"sample_index\" must be an integer");
  return it->get<std::int64_t>();
}

ordered_json prf_json(const PRF& p) {
  ordered_json out;
  out["precision"] = p.precision;
  out["recall"] = p.recall;
  out["f1"] = p.f1;
  out["tp"] = p.counts.tp;
  out["fp"] = p.counts.fp;
  out["fn"] = p.counts.fn;
  return out;
}

ordered_json task_scores_json(const TaskScores& s) {
  ordered_json out;
  out["ner"] = s.ner;
  out["rel"] = s.rel;
  out["rel_plus"] = s.rel_plus;
  return out;
}

ordered_json reward_json(const RewardBreakdown& r) {
  ordered_json out;
  out["r_f1"] = r.r_f1;
  out["r_span"] = r.r_span;
  out["r_relevancy"] = r.r_relevancy;
  out["r_rule"] = r.r_rule;
  out["total"] = r.total;
  out["gated"] = r.gated;
  return out;
}

std::vector<double> numbers(const json& obj, const char* key) {
  auto v = member<std::vector<double>>(obj, key);
  for (double x : v) {
    if (!std::isfinite(x)) throw SchemaError(std::string("field \"") + key + "\" has a non-finite value");
  }
  return v;
}

}  // namespace

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

RecordIndex::RecordIndex(const std::vector<ExtractionRecord>& records) {
  for (const auto& r : records) by_id_.emplace(r.id(), &r);
}

const ExtractionRecord* RecordIndex::find(std::string_view id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : it->second;
}

std::string parsed_completion_to_line(const std::string& record_id, std::int64_t sample_index,
                                      const ParsedCompletion& completion, const std::string& error) {
  ordered_json doc;
  doc["record_id"] = record_id;
  doc["sample_index"] = sample_index;
  doc["error"] = error.empty() ? ordered_json(nullptr) : ordered_json(error);
  doc["format"] = format_json(completion.format);
  doc["reasoning"] = completion.reasoning;
  doc["think"] = completion.think;
  doc["answer_raw"] = completion.answer_raw;
  doc["extraction"] =
      completion.extraction ? extraction_json(*completion.extraction) : ordered_json(nullptr);
  return doc.dump();
}

ParsedLine parse_parsed_line(std::string_view line, const ExtractionRecord* gold) {
  json doc = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) throw SchemaError("not a JSON object");
  ParsedLine out;
  out.record_id = member<std::string>(doc, "record_id");
  out.sample_index = sample_index_of(doc);
  if (auto it = doc.find("error"); it != doc.end() && it->is_string()) out.error = it->get<std::string>();

  auto fmt = doc.find("format");
  if (fmt == doc.end() || fmt->is_null()) return out;
  if (!fmt->is_object()) throw SchemaError("field \"format\" must be an object");

  ParsedCompletion c;
  c.format.has_reasoning = member<bool>(*fmt, "has_reasoning");
  c.format.has_think = member<bool>(*fmt, "has_think");
  c.format.has_answer = member<bool>(*fmt, "has_answer");
  c.format.answer_parses = member<bool>(*fmt, "answer_parses");
  c.format.blocks_in_order = member<bool>(*fmt, "blocks_in_order");
  c.format.dropped_items = member<std::size_t>(*fmt, "dropped_items");
  c.format.strict_ok = member<bool>(*fmt, "strict_ok");
  c.format.strict_violation = member<std::string>(*fmt, "strict_violation");
  c.reasoning = member<std::string>(doc, "reasoning");
  c.think = member<std::string>(doc, "think");
  c.answer_raw = member<std::string>(doc, "answer_raw");

  auto ext = doc.find("extraction");
  if (ext != doc.end() && !ext->is_null()) {
    if (!ext->is_object()) throw SchemaError("field \"extraction\" must be an object");
    ExtractionRecord record = gold ? gold->stripped() : ExtractionRecord(out.record_id, "");
    for (const auto& item : member<std::vector<std::array<std::string, 2>>>(*ext, "ner")) {
      record.add_entity({item[0], entity_type_from_string(item[1])});
    }
    for (const auto& item : member<std::vector<std::array<std::string, 3>>>(*ext, "rel")) {
      record.add_relation({item[0], relation_type_from_string(item[1]), item[2], std::nullopt,
                           std::nullopt});
    }
    c.extraction = std::move(record);
  }
  out.completion = std::move(c);
  return out;
}

CommandResult run_parse(std::string_view completions, const std::vector<ExtractionRecord>& records,
                        ParseMode mode, std::size_t workers) {
  const RecordIndex index(records);
  const auto lines = split_lines(completions);
  std::vector<std::string> out(lines.size());
  std::vector<std::string> failure(lines.size());
  std::vector<char> strict_ok(lines.size(), 0);
  std::vector<char> parsed(lines.size(), 0);

  parallel_for(lines.size(), workers, [&](std::size_t i) {
    std::string record_id;
    std::int64_t sample_index = 0;
    try {
      json doc = json::parse(lines[i].text, nullptr, /*allow_exceptions=*/false);
      if (doc.is_discarded() || !doc.is_object()) throw SchemaError("not a JSON object");
      record_id = member<std::string>(doc, "record_id");
      sample_index = sample_index_of(doc);
      const auto text = member<std::string>(doc, "text");
      const ExtractionRecord* gold = index.find(record_id);
      if (!gold) throw MissingRecord("unknown record id '" + record_id + "'");
      try {
        ParsedCompletion c = parse_completion(text, *gold, mode);
        strict_ok[i] = c.format.strict_ok;
        parsed[i] = c.extraction.has_value();
        out[i] = parsed_completion_to_line(record_id, sample_index, c);
      } catch (const ParseError& e) {
        // Keep the format diagnostics, drop the extraction.
        ParsedCompletion c = parse_completion(text, *gold, ParseMode::kLenient);
        c.extraction.reset();
        failure[i] = at_line(lines[i].number, e.what());
        out[i] = parsed_completion_to_line(record_id, sample_index, c, e.what());
      }
    } catch (const Error& e) {
      failure[i] = at_line(lines[i].number, e.what());
      ordered_json doc;
      doc["record_id"] = record_id.empty() ? ordered_json(nullptr) : ordered_json(record_id);
      doc["sample_index"] = sample_index;
      doc["error"] = e.what();
      doc["format"] = nullptr;
      doc["reasoning"] = "";
      doc["think"] = "";
      doc["answer_raw"] = "";
      doc["extraction"] = nullptr;
      out[i] = doc.dump();
    }
  });

  CommandResult result;
  result.output = join_lines(out);
  std::size_t n_valid = 0, n_parsed = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    n_valid += strict_ok[i];
    n_parsed += parsed[i];
    if (!failure[i].empty()) result.failures.push_back(failure[i]);
  }
  const double rate = lines.empty() ? 0.0 : static_cast<double>(n_valid) / static_cast<double>(lines.size());
  std::ostringstream s;
  s << "mode: " << to_string(mode) << '\n'
    << "completions: " << lines.size() << '\n'
    << "parsed: " << n_parsed << '\n'
    << "errors: " << result.failures.size() << '\n'
    << "format_valid_rate: " << fixed(rate, 4) << '\n';
  for (const auto& f : result.failures) s << "  " << f << '\n';
  result.summary = s.str();
  return result;
}

std::string eval_report_to_json(const EvalReport& report, const std::optional<AtKReport>& at_k) {
  ordered_json doc;
  doc["n_records"] = report.n_records;
  doc["format_valid_rate"] = report.format_valid_rate;
  doc["ner"] = prf_json(report.ner);
  doc["rel"] = prf_json(report.rel);
  doc["rel_plus"] = prf_json(report.rel_plus);
  ordered_json by_entity, by_relation;
  for (EntityType t : kAllEntityTypes) {
    by_entity[std::string(to_string(t))] = prf_json(report.ner_by_type[static_cast<std::size_t>(t)]);
  }
  for (RelationType t : kAllRelationTypes) {
    by_relation[std::string(to_string(t))] = prf_json(report.rel_by_type[static_cast<std::size_t>(t)]);
  }
  doc["ner_by_type"] = by_entity;
  doc["rel_by_type"] = by_relation;
  if (at_k) {
    ordered_json k;
    k["k"] = at_k->k;
    k["n_records"] = at_k->n_records;
    k["best_f1_at_k"] = task_scores_json(at_k->best_f1_at_k);
    k["avg_at_k"] = task_scores_json(at_k->avg_at_k);
    doc["at_k"] = k;
  } else {
    doc["at_k"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

CommandResult run_eval(std::string_view parsed, const std::vector<ExtractionRecord>& records,
                       std::optional<std::size_t> k) {
  const RecordIndex index(records);
  struct Sample {
    std::int64_t sample_index;
    ParsedCompletion completion;
  };
  // Records in order of first appearance, samples sorted by sample_index.
  std::vector<const ExtractionRecord*> order;
  std::map<const ExtractionRecord*, std::vector<Sample>> samples;
  CommandResult result;

  for (const Line& line : split_lines(parsed)) {
    json probe = json::parse(line.text, nullptr, /*allow_exceptions=*/false);
    if (probe.is_object()) {
      auto rid = probe.find("record_id");
      if (rid != probe.end() && rid->is_string() && !index.find(rid->get<std::string>())) {
        throw MissingRecord(at_line(line.number, "record id '" + rid->get<std::string>() +
                                                     "' is not in the dataset"));
      }
    }
    try {
      const ExtractionRecord* gold = nullptr;
      if (probe.is_object() && probe.contains("record_id") && probe["record_id"].is_string()) {
        gold = index.find(probe["record_id"].get<std::string>());
      }
      ParsedLine pl = parse_parsed_line(line.text, gold);
      if (!gold) throw SchemaError("missing record id");
      if (!samples.count(gold)) order.push_back(gold);
      samples[gold].push_back({pl.sample_index, pl.completion.value_or(ParsedCompletion{})});
    } catch (const Error& e) {
      result.failures.push_back(at_line(line.number, e.what()));
    }
  }
  for (auto& [gold, list] : samples) {
    std::stable_sort(list.begin(), list.end(),
                     [](const Sample& a, const Sample& b) { return a.sample_index < b.sample_index; });
  }

  std::vector<ScoredPair> pairs;
  for (const auto* gold : order) pairs.push_back({gold, &samples[gold].front().completion});
  EvalReport report = evaluate(pairs);

  std::optional<AtKReport> at_k;
  if (k) {
    std::vector<SampleGroup> groups;
    for (const auto* gold : order) {
      SampleGroup g{gold, {}};
      for (const auto& s : samples[gold]) g.second.push_back(&s.completion);
      groups.push_back(std::move(g));
    }
    at_k = score_at_k(groups, *k);
  }

  result.output = eval_report_to_json(report, at_k);
  std::ostringstream s;
  s << "records: " << report.n_records << '\n'
    << "format_valid_rate: " << fixed(report.format_valid_rate, 4) << '\n'
    << "micro F1 (%)  NER " << fixed(100.0 * report.ner.f1, 2) << "  Rel "
    << fixed(100.0 * report.rel.f1, 2) << "  Rel+ " << fixed(100.0 * report.rel_plus.f1, 2) << '\n';
  if (at_k) {
    s << "Best F1@" << at_k->k << " (%)  NER " << fixed(100.0 * at_k->best_f1_at_k.ner, 2)
      << "  Rel " << fixed(100.0 * at_k->best_f1_at_k.rel, 2) << "  Rel+ "
      << fixed(100.0 * at_k->best_f1_at_k.rel_plus, 2) << '\n'
      << "Avg@" << at_k->k << " (%)  NER " << fixed(100.0 * at_k->avg_at_k.ner, 2) << "  Rel "
      << fixed(100.0 * at_k->avg_at_k.rel, 2) << "  Rel+ " << fixed(100.0 * at_k->avg_at_k.rel_plus, 2)
      << '\n';
  }
  for (const auto& f : result.failures) s << "  " << f << '\n';
  result.summary = s.str();
  return result;
}

std::string reward_to_line(const std::string& record_id, std::int64_t sample_index,
                           const RewardBreakdown& r) {
  ordered_json doc;
  doc["record_id"] = record_id;
  doc["sample_index"] = sample_index;
  const ordered_json fields = reward_json(r);
  for (const auto& [key, value] : fields.items()) doc[key] = value;
  return doc.dump();
}

CommandResult run_reward(std::string_view parsed, const std::vector<ExtractionRecord>& records,
                         const RewardConfig& cfg, RewardTask task, std::size_t workers) {
  cfg.validate();
  const RecordIndex index(records);
  const auto lines = split_lines(parsed);
  std::vector<std::string> out(lines.size());
  std::vector<std::string> failure(lines.size());
  std::vector<std::optional<double>> totals(lines.size());

  parallel_for(lines.size(), workers, [&](std::size_t i) {
    std::string record_id;
    std::int64_t sample_index = 0;
    try {
      json probe = json::parse(lines[i].text, nullptr, /*allow_exceptions=*/false);
      if (probe.is_object() && probe.contains("record_id") && probe["record_id"].is_string()) {
        record_id = probe["record_id"].get<std::string>();
      }
      const ExtractionRecord* gold = index.find(record_id);
      ParsedLine pl = parse_parsed_line(lines[i].text, gold);
      sample_index = pl.sample_index;
      if (!gold) throw MissingRecord("record id '" + pl.record_id + "' is not in the dataset");
      RewardBreakdown r = reward_total(pl.completion.value_or(ParsedCompletion{}), *gold, cfg, task);
      totals[i] = r.total;
      out[i] = reward_to_line(record_id, sample_index, r);
    } catch (const Error& e) {
      failure[i] = at_line(lines[i].number, e.what());
      ordered_json doc;
      doc["record_id"] = record_id.empty() ? ordered_json(nullptr) : ordered_json(record_id);
      doc["sample_index"] = sample_index;
      doc["error"] = error_json(e);
      out[i] = doc.dump();
    }
  });

  CommandResult result;
  result.output = join_lines(out);
  std::array<std::size_t, 10> histogram{};
  std::vector<double> valid;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!failure[i].empty()) result.failures.push_back(failure[i]);
    if (!totals[i]) continue;
    valid.push_back(*totals[i]);
    const auto bin = static_cast<std::size_t>(std::floor(*totals[i] * 10.0));
    ++histogram[std::min<std::size_t>(bin, 9)];
  }
  const double mean =
      valid.empty() ? 0.0 : order_independent_sum(valid) / static_cast<double>(valid.size());
  std::ostringstream s;
  s << "task: " << to_string(task) << '\n'
    << "completions: " << lines.size() << '\n'
    << "scored: " << valid.size() << '\n'
    << "errors: " << result.failures.size() << '\n'
    << "mean total: " << fixed(mean, 6) << '\n'
    << "histogram of totals\n";
  for (std::size_t b = 0; b < histogram.size(); ++b) {
    s << "  [" << fixed(b / 10.0, 1) << ", " << fixed((b + 1) / 10.0, 1) << (b == 9 ? "]  " : ")  ")
      << histogram[b] << '\n';
  }
  for (const auto& f : result.failures) s << "  " << f << '\n';
  result.summary = s.str();
  return result;
}

GrpoConfig parse_grpo_config(std::string_view json_text, const GrpoConfig& base) {
  json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) throw ConfigError("$", "expected a JSON object");
  GrpoConfig cfg = base;
  for (const auto& [key, value] : doc.items()) {
    double* field = key == "epsilon" ? &cfg.epsilon
                    : key == "beta"  ? &cfg.beta
                    : key == "std_floor" ? &cfg.std_floor
                                         : nullptr;
    if (!field) throw ConfigError(key, "unknown field");
    if (!value.is_number()) throw ConfigError(key, "must be a number");
    *field = value.get<double>();
  }
  cfg.validate();
  return cfg;
}

CommandResult run_grpo(std::string_view groups_text, const GrpoConfig& cfg) {
  cfg.validate();
  CommandResult result;
  std::vector<std::string> ids;
  std::map<std::string, GrpoGroup> groups;
  for (const Line& line : split_lines(groups_text)) {
    try {
      json doc = json::parse(line.text, nullptr, /*allow_exceptions=*/false);
      if (doc.is_discarded() || !doc.is_object()) throw SchemaError("not a JSON object");
      const auto id = member<std::string>(doc, "group_id");
      const auto reward = member<double>(doc, "reward");
      if (!std::isfinite(reward)) throw SchemaError("field \"reward\" must be finite");
      OutputLogprobs o{numbers(doc, "logp"), numbers(doc, "logp_old"), numbers(doc, "logp_ref")};
      auto [it, fresh] = groups.try_emplace(id);
      if (fresh) ids.push_back(id);
      it->second.rewards.push_back(reward);
      it->second.outputs.push_back(std::move(o));
    } catch (const Error& e) {
      result.failures.push_back(at_line(line.number, e.what()));
    }
  }

  std::vector<std::string> out;
  std::vector<double> objectives;
  std::vector<std::string> group_failures;
  for (const auto& id : ids) {
    ordered_json doc;
    doc["group_id"] = id;
    try {
      ObjectiveResult r = objective(groups.at(id), cfg);
      doc["n_outputs"] = r.advantages.size();
      doc["advantages"] = r.advantages;
      doc["token_terms"] = r.token_terms;
      doc["objective"] = r.value;
      objectives.push_back(r.value);
    } catch (const Error& e) {
      doc["error"] = error_json(e);
      group_failures.push_back("group '" + id + "': " + e.what());
    }
    out.push_back(doc.dump());
  }
  result.failures.insert(result.failures.end(), group_failures.begin(), group_failures.end());
  result.output = join_lines(out);

  const double mean = objectives.empty()
                          ? 0.0
                          : order_independent_sum(objectives) / static_cast<double>(objectives.size());
  std::ostringstream s;
  s << "groups: " << ids.size() << '\n'
    << "evaluated: " << objectives.size() << '\n'
    << "errors: " << result.failures.size() << '\n'
    << "mean objective: " << std::setprecision(17) << mean << '\n';
  for (const auto& f : result.failures) s << "  " << f << '\n';
  result.summary = s.str();
  return result;
}

CommandResult run_dataset_stats(const std::vector<ExtractionRecord>& records) {
  const DatasetStats stats = compute_stats(records);
  return {stats_to_json(stats) + "\n", format_stats_table(stats), {}};
}

CommandResult run_dataset_sft(const std::vector<ExtractionRecord>& records,
                              const std::vector<TaskKind>& tasks, bool mimic, std::size_t workers) {
  std::vector<std::string> out(records.size());
  parallel_for(records.size(), workers, [&](std::size_t i) {
    for (const auto& ex : make_sft_dataset({records[i]}, tasks, mimic)) {
      out[i] += sft_example_to_line(ex);
      out[i] += '\n';
    }
  });
  CommandResult result;
  for (auto& chunk : out) result.output += chunk;
  std::ostringstream s;
  s << "records: " << records.size() << '\n'
    << "tasks:";
  for (TaskKind t : tasks) s << ' ' << to_string(t);
  s << '\n'
    << "mimic: " << (mimic ? "yes" : "no") << '\n'
    << "examples: " << records.size() * tasks.size() << '\n';
  result.summary = s.str();
  return result;
}

CommandResult run_dataset_curriculum(const std::vector<ExtractionRecord>& records,
                                     std::size_t n_buckets) {
  const CurriculumPlan plan = build_curriculum(records, n_buckets);
  std::ostringstream s;
  s << "records: " << plan.schedule.size() << '\n' << "buckets: " << plan.buckets.size() << '\n';
  for (std::size_t b = 0; b < plan.buckets.size(); ++b) {
    s << "  " << b << "  difficulty " << plan.buckets[b].min_difficulty << ".."
      << plan.buckets[b].max_difficulty << "  records " << plan.buckets[b].ids.size() << '\n';
  }
  return {curriculum_to_json(plan) + "\n", s.str(), {}};
}

CommandResult run_dataset_select(const std::vector<ExtractionRecord>& records,
                                 const SelectionOptions& options) {
  const SelectionReport report = select_subset(records, options);
  std::ostringstream s;
  s << "selected: " << report.size << " of " << report.corpus_size << " (seed " << report.seed
    << ")\n"
    << "max proportion deviation: " << fixed(report.max_proportion_deviation, 6) << '\n'
    << "max cell count deviation: " << fixed(report.max_cell_count_deviation, 6) << '\n';
  for (RelationType t : kAllRelationTypes) {
    const auto i = static_cast<std::size_t>(t);
    s << "  " << std::left << std::setw(16) << to_string(t) << report.relation_counts[i] << " / "
      << report.corpus_relation_counts[i] << '\n';
  }
  return {selection_to_json(report) + "\n", s.str(), {}};
}

CommandResult run_dataset_prompt(const std::vector<ExtractionRecord>& records,
                                 std::string_view record_id, TaskKind task) {
  const ExtractionRecord* record = RecordIndex(records).find(record_id);
  if (!record) throw MissingRecord("record id '" + std::string(record_id) + "' is not in the dataset");
  std::string prompt = render_prompt(*record, task);
  return {prompt + "\n", "record: " + record->id() + "\ntask: " + std::string(to_string(task)) + "\n",
          {}};
}

std::map<std::string, double> parse_hardness(std::string_view text) {
  std::map<std::string, double> out;
  for (const Line& line : split_lines(text)) {
    try {
      json doc = json::parse(line.text, nullptr, /*allow_exceptions=*/false);
      if (doc.is_discarded() || !doc.is_object()) throw SchemaError("not a JSON object");
      out[member<std::string>(doc, "id")] = member<double>(doc, "score");
    } catch (const Error& e) {
      throw SchemaError(at_line(line.number, e.detail()));
    }
  }
  return out;
}

std::string compute_rewards_batch(std::string_view requests_json, const RewardConfig& cfg,
                                  RewardTask task, std::size_t workers) {
  cfg.validate();
  json requests = json::parse(requests_json, nullptr, /*allow_exceptions=*/false);
  if (requests.is_discarded() || !requests.is_array()) {
    throw SchemaError("batch request must be a JSON array");
  }
  std::vector<ordered_json> out(requests.size());
  parallel_for(requests.size(), workers, [&](std::size_t i) {
    try {
      const json& req = requests[i];
      if (!req.is_object()) throw SchemaError("request must be an object");
      auto rec = req.find("record");
      if (rec == req.end()) throw SchemaError("missing field \"record\"");
      const ExtractionRecord record = parse_record_line(rec->dump());
      const auto text = member<std::string>(req, "text");
      out[i] = reward_json(reward_total(parse_completion(text, record, ParseMode::kLenient), record,
                                        cfg, task));
    } catch (const Error& e) {
      ordered_json err;
      err["error"] = error_json(e);
      out[i] = err;
    }
  });
  ordered_json doc = ordered_json::array();
  for (auto& o : out) doc.push_back(std::move(o));
  return doc.dump();
}

std::string advantages_batch(std::string_view groups_json, double std_floor) {
  json groups = json::parse(groups_json, nullptr, /*allow_exceptions=*/false);
  if (groups.is_discarded() || !groups.is_array()) {
    throw SchemaError("advantages request must be a JSON array of reward arrays");
  }
  ordered_json doc = ordered_json::array();
  for (std::size_t i = 0; i < groups.size(); ++i) {
    std::vector<double> rewards;
    try {
      rewards = groups[i].get<std::vector<double>>();
    } catch (const json::exception&) {
      throw SchemaError("group " + std::to_string(i) + " is not an array of numbers");
    }
    doc.push_back(advantages(rewards, std_floor));
  }
  return doc.dump();
}

}  // namespace sciex
