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


#include <string>

#include "doctest.h"
#include "sciex/dataset.hpp"
#include "sciex/error.hpp"
#include "sciex/output_parser.hpp"
#include "synthetic.hpp"

using namespace sciex;

namespace {

ExtractionRecord source_record() {
  ExtractionRecord r("s1", "We fine-tune BERT on SQuAD .");
  r.add_entity({"BERT", EntityType::kMethod});
  r.add_entity({"SQuAD", EntityType::kDataset});
  r.add_relation({"BERT", RelationType::kTrainedWith, "SQuAD", std::nullopt, std::nullopt});
  return r.with_resolved_types();
}

const std::string kWellFormed =
    "<reasoning>s1</reasoning><think>t1</think><answer>{\"ner\": [[\"BERT\",\"Method\"]], \"rel\": "
    "[]}</answer>";

}  // namespace

TEST_CASE("well-formed completion parses with every flag set") {
  for (ParseMode mode : {ParseMode::kStrict, ParseMode::kLenient}) {
    const auto c = parse_completion(kWellFormed, source_record(), mode);
    REQUIRE(c.extraction);
    CHECK(c.extraction->entities().size() == 1);
    CHECK(c.extraction->entities()[0] == EntityMention{"BERT", EntityType::kMethod});
    CHECK(c.extraction->relations().empty());
    CHECK(c.format.has_reasoning);
    CHECK(c.format.has_think);
    CHECK(c.format.has_answer);
    CHECK(c.format.answer_parses);
    CHECK(c.format.blocks_in_order);
    CHECK(c.format.strict_ok);
    CHECK(c.reasoning == "s1");
    CHECK(c.think == "t1");
  }
}

TEST_CASE("strict mode names the missing reasoning block") {
  try {
    parse_completion("<answer>{\"ner\": []}</answer>", source_record(), ParseMode::kStrict);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("missing reasoning block") != std::string::npos);
  }
}

TEST_CASE("strict mode rule order") {
  const auto s = source_record();
  auto violation = [&](const std::string& raw) {
    try {
      parse_completion(raw, s, ParseMode::kStrict);
    } catch (const ParseError& e) {
      return e.detail();
    }
    return std::string("ok");
  };
  CHECK(violation("<reasoning>a</reasoning>") == "missing answer block");
  CHECK(violation("<reasoning>a</reasoning><reasoning>b</reasoning><answer>{\"ner\": []}</answer>")
            .find("repeated or nested") != std::string::npos);
  CHECK(violation("<reasoning>a</reasoning><think>b<answer>{\"ner\": []}</answer>") ==
        "unterminated think block");
  CHECK(violation("<answer>{\"ner\": []}</answer><reasoning>a</reasoning>") == "blocks out of order");
  CHECK(violation("<reasoning>a</reasoning><answer>{\"ner\": [[\"X\", \"Gadget\"]]}</answer>") ==
        "unknown entity type 'Gadget'");
  CHECK(violation("<reasoning>a</reasoning><answer>{\"ner\": [], \"extra\": []}</answer>")
            .find("unexpected key") != std::string::npos);
  CHECK(violation("<reasoning>a</reasoning><answer>not json</answer>") ==
        "answer payload is not valid JSON");
  CHECK(violation("<reasoning>a</reasoning><answer>{\"ner\": []}</answer>") == "ok");
}

TEST_CASE("lenient mode drops untypable items and counts them") {
  const auto c = parse_completion(
      "<answer>{\"ner\": [[\"X\",\"Gadget\"]], \"rel\": []}</answer>", source_record(),
      ParseMode::kLenient);
  REQUIRE(c.extraction);
  CHECK(c.extraction->entities().empty());
  CHECK(c.format.dropped_items == 1);
  CHECK(c.format.answer_parses);
  CHECK_FALSE(c.format.strict_ok);
}

TEST_CASE("lenient mode recovers an answer inside a code fence without tags") {
  const std::string raw =
      "Sure! Here is the result:\n```json\n{\"ner\": [{\"entity\": \"BERT\", \"type\": \"method\"}],"
      " \"rel\": [[\"BERT\", \"trained-with\", \"SQuAD\"]]}\n```\n";
  const auto c = parse_completion(raw, source_record(), ParseMode::kLenient);
  REQUIRE(c.extraction);
  CHECK(c.extraction->entities().size() == 1);
  CHECK(c.extraction->relations().size() == 1);
  CHECK_FALSE(c.format.has_answer);
  CHECK_FALSE(c.format.has_reasoning);
  CHECK_THROWS_AS(parse_completion(raw, source_record(), ParseMode::kStrict), ParseError);
}

TEST_CASE("lenient mode never throws and may yield no extraction") {
  const char* junk[] = {"", "<answer>", "</answer><answer>", "{\"ner\": [", "<think>\"x\"</think>",
                        "<answer>{\"foo\": 1}</answer>", "{{{{}}}}", "\"\\\"{"};
  for (const char* raw : junk) {
    ParsedCompletion c;
    CHECK_NOTHROW(c = parse_completion(raw, source_record(), ParseMode::kLenient));
    CHECK(c.extraction.has_value() == c.format.answer_parses);
  }
}

TEST_CASE("render_target of an empty record") {
  ExtractionRecord empty("e", "Nothing to see .");
  const std::string target = render_target(empty, ReasoningTemplate::standard());
  CHECK(target.rfind("<reasoning>", 0) == 0);
  CHECK(target.find("{\"ner\": [], \"rel\": []}") != std::string::npos);
  const auto c = parse_completion(target, empty, ParseMode::kStrict);
  REQUIRE(c.extraction);
  CHECK(c.extraction->entities().empty());
  CHECK(c.extraction->relations().empty());
}

TEST_CASE("render_answer serializes in canonical key order") {
  ExtractionRecord r("b", "BERT .");
  r.add_entity({"BERT", EntityType::kMethod});
  CHECK(render_answer(r) == "{\"ner\": [[\"BERT\", \"Method\"]], \"rel\": []}");
  CHECK(render_answer(r, true, false) == "{\"ner\": [[\"BERT\", \"Method\"]]}");
  CHECK(render_answer(r, false, true) == "{\"rel\": []}");
}

TEST_CASE("render then strict parse reproduces every fixture record") {
  const auto records = load_dataset(SCIEX_FIXTURE_DIR "/fixture50.jsonl");
  for (const auto& r : records) {
    const auto c = parse_completion(render_target(r, ReasoningTemplate::standard()), r,
                                    ParseMode::kStrict);
    REQUIRE(c.extraction);
    CHECK(c.extraction->with_resolved_types() == r);
    CHECK(c.format.strict_ok);
  }
}

TEST_CASE("lenient parse agrees with strict whenever strict succeeds") {
  const auto records = load_dataset(SCIEX_FIXTURE_DIR "/fixture50.jsonl");
  std::vector<std::string> variants;
  for (const auto& r : records) {
    const std::string t = render_target(r, ReasoningTemplate::standard());
    variants.push_back(t);
    variants.push_back("<reasoning>x</reasoning><think>\"" + r.sentence() + "\"</think>" +
                       "<answer>" + render_answer(r) + "</answer>");
    variants.push_back("<reasoning>x</reasoning><answer>" + render_answer(r, true, false) +
                       "</answer>");
    for (const auto& raw : variants) {
      ParsedCompletion strict;
      try {
        strict = parse_completion(raw, r, ParseMode::kStrict);
      } catch (const ParseError&) {
        continue;
      }
      const auto lenient = parse_completion(raw, r, ParseMode::kLenient);
      CHECK(lenient == strict);
    }
    variants.clear();
  }
}

TEST_CASE("parsing never reads the source annotations") {
  const ExtractionRecord a = source_record();
  ExtractionRecord b = a.stripped();
  b.add_entity({"SQuAD", EntityType::kTask});
  const char* raws[] = {kWellFormed.c_str(), "<answer>{\"ner\": [[\"X\",\"Gadget\"]]}</answer>",
                        "{\"rel\": [[\"BERT\", \"Used-For\", \"SQuAD\"]]}"};
  for (const char* raw : raws) {
    for (ParseMode mode : {ParseMode::kStrict, ParseMode::kLenient}) {
      std::optional<ParsedCompletion> ca, cb;
      try {
        ca = parse_completion(raw, a, mode);
      } catch (const ParseError&) {
      }
      try {
        cb = parse_completion(raw, b, mode);
      } catch (const ParseError&) {
      }
      CHECK(ca == cb);
    }
  }
}

TEST_CASE("lenient mode takes the outermost block and the first answer") {
  const std::string raw =
      "<reasoning>r</reasoning><answer>{\"ner\": [[\"BERT\", \"Method\"]]}</answer>"
      "<answer>{\"ner\": [[\"SQuAD\", \"Dataset\"]]}</answer>";
  const auto c = parse_completion(raw, source_record(), ParseMode::kLenient);
  REQUIRE(c.extraction);
  REQUIRE(c.extraction->entities().size() == 1);
  CHECK(c.extraction->entities()[0].surface == "BERT");
  CHECK_THROWS_AS(parse_completion(raw, source_record(), ParseMode::kStrict), ParseError);
}

TEST_CASE("extraction is present iff the answer parses over fuzzed text") {
  const std::string pieces[] = {"<reasoning>", "</reasoning>", "<think>", "</think>", "<answer>",
                                "</answer>", "{\"ner\": [[\"BERT\", \"Method\"]]}", "{", "}",
                                "\"", "[", "]", "rel", "ner", " text "};
  std::uint64_t state = 12345;
  for (int i = 0; i < 2000; ++i) {
    std::string raw;
    const int n = static_cast<int>(state % 12);
    for (int j = 0; j < n; ++j) {
      state = state * 6364136223846793005ull + 1442695040888963407ull;
      raw += pieces[(state >> 33) % 15];
    }
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    const auto c = parse_completion(raw, source_record(), ParseMode::kLenient);
    CHECK(c.extraction.has_value() == c.format.answer_parses);
  }
}
