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


// sciex: batch workflows for scientific entity and relation extraction.
//
// Every command reads its inputs, writes one output artifact (stdout when
// --out is absent) and, next to a written artifact, a run manifest
// "<out>.manifest.json". The human-readable summary goes to stdout, or to
// stderr when the artifact itself is on stdout.
//
// Exit status: 0 on success, the error category number (1-10, see sciex.h)
// on a fatal error, 11 when --strict is set and some input lines failed.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sciex/sciex.h"

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kExitPartialFailure = 11;

struct CliError {
  sciex_status status;
  std::string message;
};

void check(sciex_status status) {
  if (status != SCIEX_OK) throw CliError{status, sciex_last_error()};
}

std::string read_text(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw CliError{SCIEX_IO, "IoError: cannot open '" + path + "' for reading"};
  std::string text;
  char buf[1 << 16];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
  const bool failed = std::ferror(f);
  std::fclose(f);
  if (failed) throw CliError{SCIEX_IO, "IoError: failed reading '" + path + "'"};
  return text;
}

void write_text(const std::string& path, const std::string& text) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw CliError{SCIEX_IO, "IoError: cannot open '" + path + "' for writing"};
  const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
  if (std::fclose(f) != 0 || !ok) throw CliError{SCIEX_IO, "IoError: failed writing '" + path + "'"};
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Owning wrappers for the C handles.
struct Dataset {
  sciex_dataset* p = nullptr;
  ~Dataset() { sciex_dataset_free(p); }
};
struct RewardConfig {
  sciex_reward_config* p = nullptr;
  ~RewardConfig() { sciex_reward_config_free(p); }
};
struct Result {
  sciex_result r{nullptr, nullptr, 0, nullptr};
  ~Result() { sciex_result_clear(&r); }
};

struct Run {
  std::string command;
  ordered_json args = ordered_json::object();
  std::vector<std::string> inputs;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool strict = false;
  std::string started_at;

  void input(const char* flag, const std::string& path) {
    args[flag] = path;
    inputs.push_back(path);
  }
};

Dataset load(Run& run, const std::string& path, const std::string& split) {
  run.input("dataset", path);
  if (!split.empty()) run.args["split"] = split;
  Dataset ds;
  check(sciex_dataset_load(path.c_str(), split.empty() ? nullptr : split.c_str(), &ds.p));
  return ds;
}

int finish(const Run& run, const sciex_result& result) {
  const std::string output = result.output ? result.output : "";
  const std::string summary = result.summary ? result.summary : "";
  if (run.out.empty()) {
    std::fwrite(output.data(), 1, output.size(), stdout);
    std::cerr << summary;
  } else {
    write_text(run.out, output);
    ordered_json manifest;
    manifest["command"] = run.command;
    manifest["args"] = run.args;
    manifest["config_hash"] = "fnv1a64:" + hex64(fnv1a(run.command + "\n" + run.args.dump()));
    manifest["inputs"] = ordered_json::array();
    for (const auto& path : run.inputs) {
      ordered_json in;
      in["path"] = path;
      const std::string content = read_text(path);
      in["bytes"] = content.size();
      in["fnv1a64"] = hex64(fnv1a(content));
      manifest["inputs"].push_back(in);
    }
    manifest["seed"] = run.seed ? ordered_json(*run.seed) : ordered_json(nullptr);
    manifest["version"] = sciex_version();
    manifest["output"] = run.out;
    manifest["output_fnv1a64"] = hex64(fnv1a(output));
    manifest["started_at"] = run.started_at;
    manifest["finished_at"] = utc_now();
    write_text(run.out + ".manifest.json", manifest.dump(2) + "\n");
    std::cout << summary;
  }
  if (run.strict && result.n_failures > 0) {
    std::cerr << "error: " << result.n_failures << " input line(s) failed under --strict\n";
    return kExitPartialFailure;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scientific entity and relation extraction: parsing, scoring, rewards, GRPO math "
               "and dataset tooling"};
  app.set_version_flag("--version", std::string(sciex_version()));
  app.require_subcommand(1);

  Run run;
  run.started_at = utc_now();
  std::string dataset_path, split, input_path, config_path, weights, task = "end2end", mode = "lenient",
                                                                     tasks = "all", record_id, hardness_path;
  std::size_t workers = 1, k = 0, size = 0, buckets = 4;
  std::uint64_t seed = 0;
  bool mimic = false;
  double epsilon = 0.2, beta = 0.04, std_floor = 1e-6;

  auto common = [&](CLI::App* sub, bool with_dataset) {
    sub->add_option("--out,-o", run.out, "Output file (default: stdout)");
    sub->add_flag("--strict", run.strict, "Exit nonzero when any input line fails");
    if (with_dataset) {
      sub->add_option("--dataset,-d", dataset_path, "Dataset file, or directory of <split>.jsonl")
          ->required();
      sub->add_option("--split", split, "Split name when --dataset is a directory");
    }
  };

  auto* parse = app.add_subcommand("parse", "Parse raw completions into structured extractions");
  common(parse, true);
  parse->add_option("--completions,-c", input_path, "Completions file")->required();
  parse->add_option("--mode", mode, "strict or lenient")->check(CLI::IsMember({"strict", "lenient"}));
  parse->add_option("--workers", workers, "Worker threads (0 = all cores)");

  auto* eval = app.add_subcommand("eval", "Micro-F1 report for parsed completions");
  common(eval, true);
  eval->add_option("--parsed,-p", input_path, "Parsed completions file")->required();
  eval->add_option("--k", k, "Also report Best F1@K and Avg@K")->check(CLI::PositiveNumber);

  auto* reward = app.add_subcommand("reward", "Composite reward per parsed completion");
  common(reward, true);
  reward->add_option("--parsed,-p", input_path, "Parsed completions file")->required();
  reward->add_option("--config", config_path, "Reward config file");
  reward->add_option("--weights", weights, "f1,span,relevancy,rule weights (overrides config)");
  reward->add_option("--task", task, "ner, rel or end2end")
      ->check(CLI::IsMember({"ner", "rel", "end2end"}));
  reward->add_option("--workers", workers, "Worker threads (0 = all cores)");

  auto* grpo = app.add_subcommand("grpo", "GRPO advantages, per-token terms and objective");
  common(grpo, false);
  grpo->add_option("--groups,-g", input_path, "Groups file")->required();
  grpo->add_option("--config", config_path, "GRPO config file");
  grpo->add_option("--epsilon", epsilon, "Clip range");
  grpo->add_option("--beta", beta, "KL coefficient");
  grpo->add_option("--std-floor", std_floor, "Minimum reward std for non-zero advantages");

  auto* dataset = app.add_subcommand("dataset", "Dataset tooling");
  dataset->require_subcommand(1);
  auto* stats = dataset->add_subcommand("stats", "Per-type entity and relation counts");
  common(stats, true);
  auto* sft = dataset->add_subcommand("sft", "Emit (prompt, target) training examples");
  common(sft, true);
  sft->add_option("--tasks", tasks, "Comma-separated ner,re_gold,re,e2e or all");
  sft->add_flag("--mimic", mimic, "Prepend the templated reasoning block to targets");
  sft->add_option("--workers", workers, "Worker threads (0 = all cores)");
  auto* curriculum = dataset->add_subcommand("curriculum", "Difficulty-bucketed training order");
  common(curriculum, true);
  curriculum->add_option("--buckets", buckets, "Number of difficulty buckets")
      ->check(CLI::PositiveNumber);
  auto* select = dataset->add_subcommand("select", "Distribution-preserving subset selection");
  common(select, true);
  select->add_option("--size", size, "Subset size")->required();
  select->add_option("--seed", seed, "Random seed");
  select->add_option("--buckets", buckets, "Number of difficulty buckets")->check(CLI::PositiveNumber);
  select->add_option("--hardness", hardness_path, "Lines of {\"id\", \"score\"}");
  auto* prompt = dataset->add_subcommand("prompt", "Render one record's prompt");
  common(prompt, true);
  prompt->add_option("--id", record_id, "Record id")->required();
  prompt->add_option("--task", task, "ner, re_gold, re or e2e")
      ->check(CLI::IsMember({"ner", "re_gold", "re", "e2e", "end2end"}));

  CLI11_PARSE(app, argc, argv);

  try {
    Result result;
    if (parse->parsed()) {
      run.command = "parse";
      Dataset ds = load(run, dataset_path, split);
      run.input("completions", input_path);
      run.args["mode"] = mode;
      check(sciex_parse(ds.p, read_text(input_path).c_str(), mode.c_str(), workers, &result.r));
    } else if (eval->parsed()) {
      run.command = "eval";
      Dataset ds = load(run, dataset_path, split);
      run.input("parsed", input_path);
      run.args["k"] = k;
      check(sciex_eval(ds.p, read_text(input_path).c_str(), k, &result.r));
    } else if (reward->parsed()) {
      run.command = "reward";
      Dataset ds = load(run, dataset_path, split);
      run.input("parsed", input_path);
      ordered_json cfg_json = ordered_json::object();
      if (!config_path.empty()) {
        run.input("config", config_path);
        cfg_json = ordered_json::parse(read_text(config_path), nullptr, false);
        if (cfg_json.is_discarded()) throw CliError{SCIEX_CONFIG, "ConfigError: $: not valid JSON"};
      }
      if (!weights.empty()) {
        std::vector<double> w;
        try {
          for (const auto& part : CLI::detail::split(weights, ',')) w.push_back(std::stod(part));
        } catch (const std::exception&) {
          w.clear();
        }
        if (w.size() != 4) {
          throw CliError{SCIEX_CONFIG, "ConfigError: weights: expected four comma-separated numbers"};
        }
        cfg_json["weights"] = {{"f1", w[0]}, {"span", w[1]}, {"relevancy", w[2]}, {"rule", w[3]}};
        run.args["weights"] = weights;
      }
      run.args["task"] = task;
      RewardConfig cfg;
      check(sciex_reward_config_create(cfg_json.dump().c_str(), &cfg.p));
      char* effective = nullptr;
      check(sciex_reward_config_to_json(cfg.p, &effective));
      run.args["reward_config"] = ordered_json::parse(effective);
      sciex_string_free(effective);
      check(sciex_reward(ds.p, read_text(input_path).c_str(), cfg.p, task.c_str(), workers,
                         &result.r));
    } else if (grpo->parsed()) {
      run.command = "grpo";
      run.input("groups", input_path);
      if (!config_path.empty()) {
        run.input("config", config_path);
        double e = epsilon, b = beta, f = std_floor;
        check(sciex_grpo_config_parse(read_text(config_path).c_str(), &e, &b, &f));
        // Explicit flags win over the file.
        if (!grpo->count("--epsilon")) epsilon = e;
        if (!grpo->count("--beta")) beta = b;
        if (!grpo->count("--std-floor")) std_floor = f;
      }
      run.args["epsilon"] = epsilon;
      run.args["beta"] = beta;
      run.args["std_floor"] = std_floor;
      check(sciex_grpo(read_text(input_path).c_str(), epsilon, beta, std_floor, &result.r));
    } else if (stats->parsed()) {
      run.command = "dataset stats";
      Dataset ds = load(run, dataset_path, split);
      check(sciex_dataset_stats(ds.p, &result.r));
    } else if (sft->parsed()) {
      run.command = "dataset sft";
      Dataset ds = load(run, dataset_path, split);
      run.args["tasks"] = tasks;
      run.args["mimic"] = mimic;
      check(sciex_dataset_sft(ds.p, tasks.c_str(), mimic ? 1 : 0, workers, &result.r));
    } else if (curriculum->parsed()) {
      run.command = "dataset curriculum";
      Dataset ds = load(run, dataset_path, split);
      run.args["buckets"] = buckets;
      check(sciex_dataset_curriculum(ds.p, buckets, &result.r));
    } else if (select->parsed()) {
      run.command = "dataset select";
      Dataset ds = load(run, dataset_path, split);
      run.args["size"] = size;
      run.args["buckets"] = buckets;
      run.seed = seed;
      std::string hardness;
      if (!hardness_path.empty()) {
        run.input("hardness", hardness_path);
        hardness = read_text(hardness_path);
      }
      check(sciex_dataset_select(ds.p, size, seed, buckets,
                                 hardness_path.empty() ? nullptr : hardness.c_str(), &result.r));
    } else if (prompt->parsed()) {
      run.command = "dataset prompt";
      Dataset ds = load(run, dataset_path, split);
      run.args["id"] = record_id;
      if (task == "end2end") task = "e2e";
      run.args["task"] = task;
      check(sciex_dataset_prompt(ds.p, record_id.c_str(), task.c_str(), &result.r));
    }
    return finish(run, result.r);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return static_cast<int>(e.status);
  }
}
