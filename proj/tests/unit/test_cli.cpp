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


#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string kFixtures = SCIEX_FIXTURE_DIR;
const std::string kFixture50 = kFixtures + "/fixture50.jsonl";

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("sciex_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Outcome run(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt";
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd =
      std::string("\"") + SCIEX_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = slurp(out);
  o.err = slurp(err);
  return o;
}

}  // namespace

TEST_CASE("dataset stats prints the count document") {
  const Outcome o = run("dataset stats -d " + kFixture50);
  REQUIRE(o.code == 0);
  const json doc = json::parse(o.out);
  CHECK(doc == json::parse(slurp(kFixtures + "/fixture50.stats.json")));
  CHECK(o.err.find("Evaluated-With") != std::string::npos);
}

TEST_CASE("--out writes the artifact and a manifest") {
  const fs::path out = scratch() / "stats.json";
  const Outcome o = run("dataset stats -d " + kFixture50 + " -o " + out.string());
  REQUIRE(o.code == 0);
  CHECK(o.out.find("records: 50") != std::string::npos);
  const json manifest = json::parse(slurp(out.string() + ".manifest.json"));
  CHECK(manifest["command"] == "dataset stats");
  CHECK(manifest["inputs"][0]["path"] == kFixture50);
  CHECK(manifest["inputs"][0]["bytes"] == fs::file_size(kFixture50));
  CHECK(manifest["version"] == "0.1.0");
  CHECK(manifest["seed"].is_null());
  CHECK(manifest["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
  CHECK(manifest["output_fnv1a64"].get<std::string>().size() == 16);
  CHECK(json::parse(slurp(out)) == json::parse(slurp(kFixtures + "/fixture50.stats.json")));
}

TEST_CASE("parse, eval and reward pipeline") {
  const fs::path parsed = scratch() / "parsed.jsonl";
  Outcome o = run("parse -d " + kFixture50 + " -c " + kFixtures + "/completions3.jsonl --mode strict -o " +
                  parsed.string());
  REQUIRE(o.code == 0);
  CHECK(o.out.find("line 2:") != std::string::npos);

  o = run("parse -d " + kFixture50 + " -c " + kFixtures + "/completions3.jsonl --mode strict --strict");
  CHECK(o.code == 11);
  CHECK(o.err.find("2 input line(s) failed") != std::string::npos);

  o = run("eval -d " + kFixture50 + " -p " + parsed.string());
  REQUIRE(o.code == 0);
  CHECK(json::parse(o.out)["n_records"] == 3);

  o = run("reward -d " + kFixture50 + " -p " + parsed.string() + " --weights 1,0,0,0 --task ner");
  REQUIRE(o.code == 0);
  CHECK(o.out.find("\"r_f1\":1.0") != std::string::npos);

  o = run("reward -d " + kFixture50 + " -p " + parsed.string() + " --weights 1,0,0");
  CHECK(o.code == 6);
  CHECK(o.err.find("ConfigError") != std::string::npos);
}

TEST_CASE("Best@K through the command line") {
  const fs::path parsed = scratch() / "bestk_parsed.jsonl";
  const std::string ds = kFixtures + "/bestk.jsonl";
  REQUIRE(run("parse -d " + ds + " -c " + kFixtures + "/bestk.completions.jsonl -o " + parsed.string()).code == 0);
  Outcome o = run("eval -d " + ds + " -p " + parsed.string() + " --k 3");
  REQUIRE(o.code == 0);
  const json doc = json::parse(o.out);
  CHECK(doc["at_k"]["best_f1_at_k"]["ner"].get<double>() == doctest::Approx(1.0));
  CHECK(doc["at_k"]["avg_at_k"]["ner"].get<double>() == doctest::Approx(0.5));
  o = run("eval -d " + ds + " -p " + parsed.string() + " --k 4");
  CHECK(o.code == 7);
}

TEST_CASE("grpo options and config precedence") {
  const std::string groups = kFixtures + "/groups.jsonl";
  const fs::path cfg = scratch() / "grpo.json";
  std::ofstream(cfg) << "{\"beta\": 0.3, \"epsilon\": 0.1}";
  const fs::path out = scratch() / "grpo.jsonl";
  Outcome o = run("grpo -g " + groups + " --config " + cfg.string() + " --beta 0.0 -o " + out.string());
  REQUIRE(o.code == 0);
  const json manifest = json::parse(slurp(out.string() + ".manifest.json"));
  CHECK(manifest["args"]["beta"] == 0.0);
  CHECK(manifest["args"]["epsilon"] == 0.1);
  CHECK(manifest["inputs"].size() == 2);
  o = run("grpo -g " + groups + " --strict");
  CHECK(o.code == 11);
  o = run("grpo -g " + groups + " --epsilon 1.5");
  CHECK(o.code == 6);
}

TEST_CASE("errors map to exit codes") {
  CHECK(run("dataset stats -d /no/such.jsonl").code == 2);
  CHECK(run("dataset prompt -d " + kFixture50 + " --id nope").code == 9);
  CHECK(run("dataset select -d " + kFixture50 + " --size 500").code == 8);
  const Outcome usage = run("dataset select -d " + kFixture50);
  CHECK(usage.code != 0);
  CHECK(run("--version").code == 0);
}

TEST_CASE("prompt and sft commands") {
  Outcome o = run("dataset prompt -d " + kFixture50 + " --id fx-unicode --task end2end");
  REQUIRE(o.code == 0);
  CHECK(o.out.find("Übersetzung") != std::string::npos);
  o = run("dataset sft -d " + kFixture50 + " --tasks ner --mimic");
  REQUIRE(o.code == 0);
  std::size_t lines = 0;
  for (char c : o.out) lines += c == '\n';
  CHECK(lines == 50);
}

TEST_CASE("every command is byte-for-byte deterministic") {
  const std::string parsed = (scratch() / "det_parsed.jsonl").string();
  REQUIRE(run("parse -d " + kFixture50 + " -c " + kFixtures + "/completions3.jsonl -o " + parsed).code == 0);
  const std::vector<std::string> commands = {
      "parse -d " + kFixture50 + " -c " + kFixtures + "/completions3.jsonl --workers 2",
      "eval -d " + kFixture50 + " -p " + parsed,
      "reward -d " + kFixture50 + " -p " + parsed + " --workers 3",
      "grpo -g " + kFixtures + "/groups.jsonl",
      "dataset stats -d " + kFixture50,
      "dataset sft -d " + kFixture50 + " --mimic --workers 2",
      "dataset curriculum -d " + kFixture50 + " --buckets 3",
      "dataset select -d " + kFixture50 + " --size 20 --seed 9",
      "dataset prompt -d " + kFixture50 + " --id fx-quote --task re_gold",
  };
  for (const auto& c : commands) {
    const Outcome a = run(c);
    const Outcome b = run(c);
    CAPTURE(c);
    CHECK(a.code == 0);
    CHECK(!a.out.empty());
    CHECK(a.out == b.out);
  }
}
