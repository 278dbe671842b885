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

#include "sciex/prompts.hpp"

#include <algorithm>

#include "json.hpp"
#include "sciex/error.hpp"

namespace sciex {

namespace {

constexpr std::string_view kSystemPrompt = R"(Respond in the following format:
<reasoning>
Provide step-by-step reasoning to solve the task based on the given instructions and sentence.
</reasoning>
<think>
Cite the specific sentence part (e.g., phrase, verb, or structure) supporting the relation. Articulate a symbolic pattern you discovered (e.g., "The verb 'achieves' suggests a Method is applied to a Task, implying a relation"). Explain how this pattern leads to the predicted relation, referencing the relationship definition. Use concise, logical chains (e.g., "X performs Y → relation Z because of definition").
</think>
<answer>
Provide the final answer in JSON format as specified in the instruction.
</answer>)";

constexpr std::string_view kNerBackground =
    R"(Extract specific entities from the following sentence. The entities to be identified are: 'Dataset', 'Task', and 'Method'.

### Entity Definitions:

- 'Task': A task in machine learning refers to the specific problem or type of problem that a ML/AI model/method is designed to solve. Tasks can be broad, like classification, regression, or clustering, or they can be very specific, such as Pedestrian Detection, Autonomous Driving, Sentiment Analysis, Named Entity Recognition, and Relation Extraction.

- 'Method': A method entity refers to the approach, algorithm, or technique used to solve a specific task/problem. Methods encompass the computational algorithms, model architectures, and the training procedures that are employed to make predictions or decisions based on data. For example, Convolutional Neural Networks, Dropout, data augmentation, recurrent neural networks.

- 'Dataset': A realistic collection of data that is used for training, validating, or testing the algorithms. These datasets can consist of various forms of data such as text, images, videos, or structured data. For example, MNIST, COCO, AGNews, IMDb.

### Other Notes:

- Generics cannot be used independently to refer to any specific entities, e.g., 'This task', 'the dataset', and 'a public corpus' are not entities.

- The determiners should not be part of an entity span. For example, given span 'the SQuAD v1.1 dataset', where the determiner 'the' should be excluded from the entity span.

- If both the full name and the abbreviation are present in the sentence, annotate the abbreviation and its corresponding full name separately. For instance, '20-newsgroup (20NG)'.

- Only annotate "factual, content-bearing" entities. Task, dataset, and method entities normally have specific names and their meanings are consistent across different papers. For example, "CoNLL03", "SNLI" are factual entities. Annotators should annotate only the minimum necessary to represent the original meaning of task/dataset/metric (e.g., "The", "dataset", "public", 'method', 'technique' are often omitted).)";

constexpr std::string_view kRelationBackground =
    R"(Based on the given sentence and the entities with their types, determine the relationship between each pair. The potential relations are: ['Part-Of', 'SubClass-Of', 'SubTask-Of', 'Benchmark-For', 'Trained-With', 'Evaluated-With', 'Synonym-Of', 'Used-For', 'Compare-With']. If no relationship exists between a pair, do not include it in the output.

### Relationship Definitions:

- 'Part-Of': This relationship denotes that one entity (e.g., a Method) is a component or a part of another entity (e.g., another Method).

- 'SubClass-Of': Specifies that one entity is a subclass or a specialized version of another entity.

- 'SubTask-Of': Indicates that one Task is a subset or a specific aspect of another broader Task.

- 'Benchmark-For': Shows that a Dataset serves as a standard or benchmark for evaluating the performance of a Method on a Task.

- 'Trained-With': Indicates that a Method is trained using a Dataset.

- 'Evaluated-With': This relationship denotes that a Method is evaluated using a Dataset to test its performance or conduct experiments.

- 'Synonym-Of': Indicates that two entities are considered to have the same or very similar meaning, such as abbreviations.

- 'Used-For': Shows that one entity (e.g., a Method) is utilized for achieving or performing another entity (e.g., a Task). This relationship is highly flexible.

- 'Compare-With': This relationship is used when one entity is compared with another to highlight differences, similarities, or both.

### Notes:

- Determine the 'Relationship' that best describes how the subject and object are related, based on the sentence context.

- Please do not annotate negative relations (e.g., X is not used in Y).

- Annotate a relationship only if there is direct evidence or clear implication in the text. Avoid inferring relationships that are not explicitly mentioned or clearly implied.)";

constexpr std::string_view kSentenceLead = "Given the sentence: \"";

constexpr std::string_view kNerFormat = "- \"ner\": a list of [entity, type] pairs.";
constexpr std::string_view kRelFormat = "- \"rel\": a list of [subject, relation, object] triples.";

std::string escape_sentence(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string instruction(const ExtractionRecord& record, TaskKind task) {
  std::string out = std::string(kSentenceLead) + escape_sentence(record.sentence()) + "\"\n\n";
  switch (task) {
    case TaskKind::kNerOnly:
      out += "Extract entities.\n\n### Instruction:\n\n"
             "- Think step-by-step to identify entities ('Dataset', 'Task', 'Method').\n\n"
             "- Return the results in JSON format with:\n\n";
      out += kNerFormat;
      break;
    case TaskKind::kReGoldEntities: {
      nlohmann::json entities = nlohmann::json::array();
      for (const auto& e : record.entities()) {
        entities.push_back({e.surface, std::string(to_string(e.type))});
      }
      out += "Given the entities: " + entities.dump() + "\n\n";
      out += "Extract the relations between the given entities.\n\n### Instruction:\n\n"
             "- Think step-by-step to determine the relationships between the given entities.\n\n"
             "- Return the results in JSON format with:\n\n";
      out += kRelFormat;
      break;
    }
    case TaskKind::kReOnly:
      out += "Extract relations between entities.\n\n### Instruction:\n\n"
             "- Think step-by-step to identify the related entities ('Dataset', 'Task', "
             "'Method') and their relationships.\n\n"
             "- Return the results in JSON format with:\n\n";
      out += kRelFormat;
      break;
    case TaskKind::kEndToEnd:
      out += "Extract entities and their relations.\n\n### Instruction:\n\n"
             "- Think step-by-step to identify entities ('Dataset', 'Task', 'Method') and their "
             "relationships.\n\n"
             "- Return the results in JSON format with:\n\n";
      out += kNerFormat;
      out += "\n\n";
      out += kRelFormat;
      break;
  }
  return out;
}

}  // namespace

std::string_view to_string(TaskKind task) {
  switch (task) {
    case TaskKind::kNerOnly: return "ner";
    case TaskKind::kReGoldEntities: return "re_gold";
    case TaskKind::kReOnly: return "re";
    case TaskKind::kEndToEnd: return "e2e";
  }
  return "e2e";
}

TaskKind task_kind_from_string(std::string_view s) {
  for (TaskKind t : kAllTaskKinds) {
    if (to_string(t) == s) return t;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown task '" + std::string(s) + "' (expected ner, re_gold, re, e2e)");
}

std::vector<TaskKind> parse_task_list(std::string_view s) {
  if (s == "all") return {kAllTaskKinds.begin(), kAllTaskKinds.end()};
  std::vector<TaskKind> tasks;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string_view::npos) comma = s.size();
    TaskKind t = task_kind_from_string(s.substr(pos, comma - pos));
    if (std::find(tasks.begin(), tasks.end(), t) == tasks.end()) tasks.push_back(t);
    pos = comma + 1;
  }
  return tasks;
}

std::string_view system_prompt() { return kSystemPrompt; }
std::string_view ner_background() { return kNerBackground; }
std::string_view relation_background() { return kRelationBackground; }

std::string render_prompt(const ExtractionRecord& record, TaskKind task) {
  const bool ner = task == TaskKind::kNerOnly || task == TaskKind::kEndToEnd;
  const bool rel = task != TaskKind::kNerOnly;
  std::string out(kSystemPrompt);
  if (ner) out += "\n\n" + std::string(kNerBackground);
  if (rel) out += "\n\n" + std::string(kRelationBackground);
  out += "\n\n" + instruction(record, task);
  return out;
}

std::optional<std::string> extract_prompt_sentence(std::string_view prompt) {
  std::size_t p = prompt.find(kSentenceLead);
  if (p == std::string_view::npos) return std::nullopt;
  std::string out;
  for (std::size_t i = p + kSentenceLead.size(); i < prompt.size(); ++i) {
    char c = prompt[i];
    if (c == '\\' && i + 1 < prompt.size()) {
      out.push_back(prompt[++i]);
    } else if (c == '"') {
      return out;
    } else {
      out.push_back(c);
    }
  }
  return std::nullopt;
}

ExtractionRecord project_for_task(const ExtractionRecord& record, TaskKind task) {
  ExtractionRecord out = record.stripped();
  if (task == TaskKind::kNerOnly || task == TaskKind::kEndToEnd) {
    for (const auto& e : record.entities()) out.add_entity(e);
  }
  if (task != TaskKind::kNerOnly) {
    for (const auto& r : record.relations()) out.add_relation(r);
  }
  return out;
}

std::vector<SftExample> make_sft_dataset(const std::vector<ExtractionRecord>& records,
                                         const std::vector<TaskKind>& tasks, bool mimic,
                                         const ReasoningTemplate& tmpl) {
  std::vector<SftExample> out;
  out.reserve(records.size() * tasks.size());
  for (const auto& record : records) {
    for (TaskKind task : tasks) {
      const bool ner = task == TaskKind::kNerOnly || task == TaskKind::kEndToEnd;
      const bool rel = task != TaskKind::kNerOnly;
      SftExample ex;
      ex.record_id = record.id();
      ex.task = task;
      ex.prompt = render_prompt(record, task);
      ex.target = mimic ? render_target(record, tmpl, ner, rel) : render_answer(record, ner, rel);
      out.push_back(std::move(ex));
    }
  }
  return out;
}

std::string sft_example_to_line(const SftExample& example) {
  nlohmann::ordered_json doc;
  doc["record_id"] = example.record_id;
  doc["task"] = std::string(to_string(example.task));
  doc["prompt"] = example.prompt;
  doc["target"] = example.target;
  return doc.dump();
}

}  // namespace sciex
