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


#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "sciex/sciex.h"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kFixture = std::string(SCIEX_FIXTURE_DIR) + "/fixture50.jsonl";

struct Dataset {
  sciex_dataset* ptr = nullptr;
  Dataset() { REQUIRE(sciex_dataset_load(kFixture.c_str(), nullptr, &ptr) == SCIEX_OK); }
  ~Dataset() { sciex_dataset_free(ptr); }
};

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strcmp(sciex_version(), "0.1.0") == 0);
  CHECK(std::strcmp(sciex_status_name(SCIEX_OK), "Ok") == 0);
  CHECK(std::strcmp(sciex_status_name(SCIEX_GROUP_TOO_SMALL), "GroupTooSmall") == 0);
}

TEST_CASE("dataset handles") {
  Dataset ds;
  size_t n = 0;
  CHECK(sciex_dataset_size(ds.ptr, &n) == SCIEX_OK);
  CHECK(n == 50);

  sciex_dataset* bad = nullptr;
  CHECK(sciex_dataset_load("/no/such/file.jsonl", nullptr, &bad) == SCIEX_IO);
  CHECK(bad == nullptr);
  CHECK(std::strstr(sciex_last_error(), "/no/such/file.jsonl") != nullptr);

  const char text[] = "{\"id\": \"a\", \"sentence\": \"BERT\", \"ner\": [[\"BERT\", \"Model\"]]}";
  CHECK(sciex_dataset_parse(text, sizeof(text) - 1, &bad) == SCIEX_TYPE);
  CHECK(sciex_dataset_parse(nullptr, 1, &bad) == SCIEX_INVALID_ARGUMENT);
  REQUIRE(sciex_dataset_parse(nullptr, 0, &bad) == SCIEX_OK);
  CHECK(sciex_dataset_size(bad, &n) == SCIEX_OK);
  CHECK(n == 0);
  sciex_dataset_free(bad);
  CHECK(sciex_dataset_size(nullptr, &n) == SCIEX_INVALID_ARGUMENT);
  sciex_dataset_free(nullptr);
}

TEST_CASE("reward config handles") {
  sciex_reward_config* cfg = nullptr;
  REQUIRE(sciex_reward_config_create(nullptr, &cfg) == SCIEX_OK);
  char* json = nullptr;
  REQUIRE(sciex_reward_config_to_json(cfg, &json) == SCIEX_OK);
  CHECK(std::strstr(json, "\"f1\": 0.6") != nullptr);
  sciex_reward_config* again = nullptr;
  CHECK(sciex_reward_config_create(json, &again) == SCIEX_OK);
  sciex_string_free(json);
  sciex_reward_config_free(again);
  sciex_reward_config_free(cfg);

  CHECK(sciex_reward_config_create("{\"weights\": {\"f1\": 5}}", &cfg) == SCIEX_CONFIG);
  CHECK(std::strstr(sciex_last_error(), "weights") != nullptr);
}

TEST_CASE("parse, eval and reward through the C surface") {
  Dataset ds;
  const std::string completions = slurp(std::string(SCIEX_FIXTURE_DIR) + "/completions3.jsonl");
  sciex_result parsed{};
  REQUIRE(sciex_parse(ds.ptr, completions.c_str(), "strict", 1, &parsed) == SCIEX_OK);
  CHECK(parsed.n_failures == 2);
  CHECK(std::strncmp(parsed.failures, "line 2:", 7) == 0);

  sciex_result eval{};
  REQUIRE(sciex_eval(ds.ptr, parsed.output, 0, &eval) == SCIEX_OK);
  CHECK(std::strstr(eval.output, "\"n_records\": 3") != nullptr);
  sciex_result_clear(&eval);
  CHECK(eval.output == nullptr);
  CHECK(sciex_eval(ds.ptr, parsed.output, 2, &eval) == SCIEX_GROUP_TOO_SMALL);

  sciex_reward_config* cfg = nullptr;
  REQUIRE(sciex_reward_config_create(nullptr, &cfg) == SCIEX_OK);
  sciex_result reward{};
  REQUIRE(sciex_reward(ds.ptr, parsed.output, cfg, "end2end", 2, &reward) == SCIEX_OK);
  CHECK(std::strstr(reward.output, "\"gated\":true") != nullptr);
  CHECK(sciex_reward(ds.ptr, parsed.output, cfg, "joint", 1, &reward) == SCIEX_INVALID_ARGUMENT);
  CHECK(sciex_parse(ds.ptr, completions.c_str(), "loose", 1, &parsed) == SCIEX_INVALID_ARGUMENT);
  sciex_result_clear(&reward);
  sciex_result_clear(&parsed);
  sciex_reward_config_free(cfg);
}

TEST_CASE("grpo through the C surface") {
  double eps = 0.2, beta = 0.04, floor = 1e-6;
  CHECK(sciex_grpo_config_parse("{\"beta\": 0.5}", &eps, &beta, &floor) == SCIEX_OK);
  CHECK(beta == 0.5);
  CHECK(eps == 0.2);
  CHECK(sciex_grpo_config_parse("{\"epsilon\": 3}", &eps, &beta, &floor) == SCIEX_CONFIG);

  const std::string groups = slurp(std::string(SCIEX_FIXTURE_DIR) + "/groups.jsonl");
  sciex_result r{};
  REQUIRE(sciex_grpo(groups.c_str(), 0.2, 0.04, 1e-6, &r) == SCIEX_OK);
  CHECK(r.n_failures == 1);
  sciex_result_clear(&r);
  CHECK(sciex_grpo(groups.c_str(), 1.5, 0.04, 1e-6, &r) == SCIEX_CONFIG);
}

TEST_CASE("dataset commands through the C surface") {
  Dataset ds;
  sciex_result r{};
  REQUIRE(sciex_dataset_stats(ds.ptr, &r) == SCIEX_OK);
  CHECK(std::strstr(r.output, "\"total\": 104") != nullptr);
  sciex_result_clear(&r);
  REQUIRE(sciex_dataset_sft(ds.ptr, "ner,re", 1, 2, &r) == SCIEX_OK);
  CHECK(std::strstr(r.output, "\"target\":\"<reasoning>") != nullptr);
  sciex_result_clear(&r);
  CHECK(sciex_dataset_sft(ds.ptr, "ner,bogus", 0, 1, &r) == SCIEX_INVALID_ARGUMENT);
  REQUIRE(sciex_dataset_curriculum(ds.ptr, 4, &r) == SCIEX_OK);
  sciex_result_clear(&r);
  REQUIRE(sciex_dataset_select(ds.ptr, 10, 7, 4, nullptr, &r) == SCIEX_OK);
  sciex_result_clear(&r);
  CHECK(sciex_dataset_select(ds.ptr, 51, 7, 4, nullptr, &r) == SCIEX_SIZE_TOO_LARGE);
  CHECK(sciex_dataset_select(ds.ptr, 5, 7, 4, "{\"id\": \"nope\", \"score\": 0.5}", &r) ==
        SCIEX_MISSING_RECORD);
  REQUIRE(sciex_dataset_prompt(ds.ptr, "fx-000", "ner", &r) == SCIEX_OK);
  CHECK(std::strstr(r.output, "PURE") != nullptr);
  sciex_result_clear(&r);
  CHECK(sciex_dataset_prompt(ds.ptr, "fx-999", "ner", &r) == SCIEX_MISSING_RECORD);
}

TEST_CASE("trainer batch functions") {
  sciex_reward_config* cfg = nullptr;
  REQUIRE(sciex_reward_config_create(nullptr, &cfg) == SCIEX_OK);
  const char* requests =
      "[{\"record\": {\"id\": \"a\", \"sentence\": \"We use BERT .\", \"ner\": [[\"BERT\", \"Method\"]]},"
      " \"text\": \"<reasoning>r</reasoning><answer>{\\\"ner\\\": [[\\\"BERT\\\", \\\"Method\\\"]], "
      "\\\"rel\\\": []}</answer>\"}]";
  char* out = nullptr;
  REQUIRE(sciex_compute_rewards_batch(requests, cfg, "ner", 1, &out) == SCIEX_OK);
  CHECK(std::strstr(out, "\"r_f1\":1.0") != nullptr);
  sciex_string_free(out);
  CHECK(sciex_compute_rewards_batch("nope", cfg, "ner", 1, &out) == SCIEX_SCHEMA);
  sciex_reward_config_free(cfg);

  REQUIRE(sciex_advantages_batch("[[0, 1], [2, 2, 2]]", 1e-6, &out) == SCIEX_OK);
  CHECK(std::string(out) == "[[-1.0,1.0],[0.0,0.0,0.0]]");
  sciex_string_free(out);
  CHECK(sciex_advantages_batch("[[1]]", 1e-6, &out) == SCIEX_GROUP_TOO_SMALL);
}
