// Copyright 2026 The Persona Engine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// persona-eval: analyzer benchmarks, scripted simulations and ICC.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "persona/backends.hpp"
#include "persona/chat_client.hpp"
#include "persona/errors.hpp"
#include "persona/eval.hpp"
#include "persona/lexicon.hpp"
#include "persona/orchestrator.hpp"

namespace {

using namespace persona;

struct RunArgs {
  std::string dataset;
  std::string axis = "agency";
  std::string backend = "lexicon";
  std::string prompt = "long";
  std::string out;
  std::string lexicon = "lexicons/ipc_lexicon.json";
  std::string replay;
  std::string model;
  bool prefix = false;
  std::size_t concurrency = 4;
};

std::unique_ptr<AnalyzerBackend> make_analyzer(const RunArgs& args) {
  if (args.backend == "lexicon") {
    return std::make_unique<LexiconBackend>(Lexicon::load(args.lexicon));
  }
  if (args.backend == "replay") {
    if (args.replay.empty()) throw ConfigError("--replay is required for the replay backend");
    return std::make_unique<ReplayAnalyzerBackend>(ReplayAnalyzerBackend::load(args.replay));
  }
  auto settings = EndpointSettings::from_env();
  if (!args.model.empty()) settings.model = args.model;
  if (settings.model.empty()) throw ConfigError("set PERSONA_LLM_MODEL or --model");
  auto client = std::make_shared<ChatClient>(std::make_shared<HttpTransport>(settings),
                                             ChatOptions{settings.model, 1, 0.0});
  return std::make_unique<RemoteAnalyzerBackend>(std::move(client), args.prefix);
}

int run(const RunArgs& args) {
  const auto records = load_dataset(args.dataset);
  const auto backend = make_analyzer(args);
  const auto prompt = default_prompt(args.axis, parse_prompt_variant(args.prompt));
  const auto report = run_eval(records, *backend, prompt, args.concurrency);
  if (!args.out.empty()) {
    std::ofstream out(args.out);
    if (!out) throw ConfigError("cannot write " + args.out);
    out << nlohmann::json(report).dump(2) << '\n';
  }
  std::cout << metrics_table({&report, 1});
  return 0;
}

int simulate(const std::string& scenario_path, const std::string& script_path,
             std::uint64_t seed, const std::string& out_path) {
  auto scenario = std::make_shared<const Scenario>(Scenario::load(scenario_path));
  const auto script = load_script(script_path);
  const auto turns = run_scripted_session(scenario, script, seed, hermetic_backends(*scenario));
  const auto csv = trajectory_csv(trajectory_rows(*scenario, turns));
  if (out_path.empty()) {
    std::cout << csv;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + out_path);
  out << csv;
  return 0;
}

int icc_command(const std::string& path) {
  std::printf("%.6f\n", icc(load_ratings(path)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analyzer evaluation and personality simulation"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Score a labeled dataset and report metrics");
  run_cmd->add_option("--dataset", run_args.dataset, "JSON-lines dataset")->required();
  run_cmd->add_option("--axis", run_args.axis)->check(CLI::IsMember({"agency", "communion"}));
  run_cmd->add_option("--backend", run_args.backend)
      ->check(CLI::IsMember({"remote", "lexicon", "replay"}));
  run_cmd->add_option("--prompt", run_args.prompt)->check(CLI::IsMember({"short", "long"}));
  run_cmd->add_option("--out", run_args.out, "Write the JSON report here");
  run_cmd->add_option("--lexicon", run_args.lexicon, "Lexicon file for --backend lexicon");
  run_cmd->add_option("--replay", run_args.replay, "Predictions file for --backend replay");
  run_cmd->add_option("--model", run_args.model, "Overrides PERSONA_LLM_MODEL");
  run_cmd->add_flag("--prefix", run_args.prefix, "Send an assistant answer prefix");
  run_cmd->add_option("--concurrency", run_args.concurrency)->check(CLI::PositiveNumber);

  std::string scenario_path;
  std::string script_path;
  std::uint64_t seed = 1;
  std::string csv_out;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a scripted session hermetically");
  sim_cmd->add_option("--scenario", scenario_path)->required();
  sim_cmd->add_option("--script", script_path, "One user message per line")->required();
  sim_cmd->add_option("--seed", seed);
  sim_cmd->add_option("--out", csv_out, "Trajectory CSV (stdout when omitted)");

  std::string ratings_path;
  auto* icc_cmd = app.add_subcommand("icc", "ICC(2,1) of a ratings matrix");
  icc_cmd->add_option("--ratings", ratings_path, "Rows are messages, columns raters")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(run_args);
    if (*sim_cmd) return simulate(scenario_path, script_path, seed, csv_out);
    return icc_command(ratings_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
