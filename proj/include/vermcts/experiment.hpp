// Copyright 2026 The VerMCTS Authors
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

#ifndef VERMCTS_EXPERIMENT_HPP_
#define VERMCTS_EXPERIMENT_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vermcts/baselines.hpp"
#include "vermcts/generator.hpp"
#include "vermcts/harness.hpp"
#include "vermcts/problem.hpp"
#include "vermcts/run_log.hpp"
#include "vermcts/search.hpp"

namespace vermcts {

/// Per-method hyperparameters. The defaults are the tuned values: VerMCTS
/// temperature 1.0, c_uct 3, p_widen 0.1; rollout temperature 0.8, c_uct 1,
/// k 3; Reflexion temperature 0.4; whole sampling temperature 0.6; nucleus
/// sampling with top_p 0.95 everywhere.
struct MethodSettings {
  SearchParams vermcts;
  WholeParams whole;
  RolloutParams rollout;
  ReflexionParams reflexion;
  double top_p = 0.95;
  std::size_t max_action_tokens = 64;

  SamplingParams sampling_for(Method method) const;
};

nlohmann::json to_json(const MethodSettings& settings);

struct ExperimentConfig {
  std::filesystem::path suite = default_suite_path();
  /// Empty means every problem of the suite.
  std::vector<std::string> problems;
  std::vector<Method> methods = {Method::kVerMcts, Method::kWhole, Method::kRollout,
                                 Method::kReflexion};
  std::size_t n = 20;
  std::size_t max_tokens = 5000;
  std::size_t max_actions = 200;
  std::optional<std::chrono::milliseconds> wall_clock_limit;
  std::uint64_t base_seed = 0;
  /// Overrides base_seed + i when non-empty; must hold n distinct seeds.
  std::vector<std::uint64_t> seeds;
  GeneratorSpec generator;
  /// Script files per problem id for the scripted generator.
  std::map<std::string, std::filesystem::path> scripts;
  std::optional<std::filesystem::path> dafny_path;
  std::optional<std::filesystem::path> coq_path;
  std::chrono::milliseconds verifier_timeout{60000};
  std::size_t workers = 1;
  std::filesystem::path out_dir = "vermcts_out";
  std::size_t curve_step = 100;
  bool plot = false;
  MethodSettings settings;

  std::vector<std::uint64_t> run_seeds() const;
};

/// Relative paths in \p j resolve against \p base_dir.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                             const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

/// Loaded problems plus verifier specs, checked before any run starts.
struct ExperimentPlan {
  std::vector<ProblemSpec> problems;
  std::map<Language, VerifierSpec> verifiers;
};

/// Throws ConfigError (or VerifierMissing) on any configuration problem.
ExperimentPlan plan_experiment(const ExperimentConfig& config);

/// One seeded run of \p method on \p problem with a fresh generator and
/// verifier.
RunLog run_single(const ProblemSpec& problem, Method method, std::uint64_t seed,
                  const ExperimentConfig& config, const ExperimentPlan& plan);

struct ExperimentResult {
  std::vector<RunLog> logs;
  std::vector<PassCurve> curves;
  std::vector<TreeStatPoint> tree_series;
};

/// Runs n seeded runs per (problem, method) on up to config.workers threads,
/// writes one log file per run under out_dir/runs and the curves under
/// out_dir.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::filesystem::path run_log_path(const std::filesystem::path& out_dir,
                                   std::string_view problem, std::string_view method,
                                   std::uint64_t seed);
void write_run_log(const std::filesystem::path& path, const RunLog& log);

/// Every *.jsonl file under \p dir, in path order. A malformed line throws
/// std::runtime_error naming the file and line.
std::vector<RunLog> read_run_logs(const std::filesystem::path& dir);

}  // namespace vermcts

#endif  // VERMCTS_EXPERIMENT_HPP_
