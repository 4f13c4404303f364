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

#include "vermcts/experiment.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vermcts/errors.hpp"
#include "vermcts/export.hpp"
#include "vermcts/process.hpp"

namespace vermcts {
namespace {

using nlohmann::json;
using testing::read_text;
using testing::source_dir;
using testing::write_file;

ExperimentConfig toy_config(const std::filesystem::path& out) {
  ExperimentConfig c;
  c.suite = source_dir() / "problems";
  c.problems = {"toy_single_assert", "toy_constant"};
  c.n = 2;
  c.max_tokens = 300;
  c.base_seed = 5;
  c.generator.kind = GeneratorKind::kGrammar;
  c.out_dir = out;
  c.curve_step = 100;
  return c;
}

TEST(Config, ParsesEveryField) {
  const json j = json::parse(R"({
    "suite": "suite", "problems": ["a"], "methods": ["whole", "rollout"], "n": 3,
    "max_tokens": 700, "max_actions": 50, "wall_clock_seconds": 1.5, "base_seed": 9,
    "seeds": [4, 5, 6], "generator": {"kind": "scripted", "grammar_seed": 11, "depth_cap": 2,
      "weights": {"def": 2.0, "qed": 0.5}},
    "scripts": {"a": "a.script"}, "dafny_path": "/opt/dafny", "coq_path": null,
    "verifier_timeout_seconds": 5, "workers": 2, "out_dir": "out", "curve_step": 50, "plot": true,
    "settings": {"top_p": 0.9, "max_action_tokens": 32, "vermcts": {"c_uct": 2.0, "p_widen": 0.2},
      "whole": {"per_sample_token_cap": 100}, "rollout": {"children_per_expand": 2},
      "reflexion": {"max_rounds": 7, "instruction": "Again."}}
  })");
  const ExperimentConfig c = experiment_config_from_json(j, "/base");
  EXPECT_EQ(c.suite, std::filesystem::path("/base/suite"));
  EXPECT_EQ(c.problems, std::vector<std::string>{"a"});
  EXPECT_EQ(c.methods, (std::vector<Method>{Method::kWhole, Method::kRollout}));
  EXPECT_EQ(c.n, 3u);
  EXPECT_EQ(c.max_tokens, 700u);
  EXPECT_EQ(c.max_actions, 50u);
  EXPECT_EQ(c.wall_clock_limit, std::chrono::milliseconds(1500));
  EXPECT_EQ(c.run_seeds(), (std::vector<std::uint64_t>{4, 5, 6}));
  EXPECT_EQ(c.generator.kind, GeneratorKind::kScripted);
  EXPECT_EQ(c.generator.grammar_seed, 11u);
  EXPECT_EQ(c.generator.grammar_depth_cap, 2);
  EXPECT_DOUBLE_EQ(c.generator.grammar.def, 2.0);
  EXPECT_EQ(c.scripts.at("a"), std::filesystem::path("/base/a.script"));
  EXPECT_EQ(c.dafny_path, std::filesystem::path("/opt/dafny"));
  EXPECT_FALSE(c.coq_path);
  EXPECT_EQ(c.verifier_timeout, std::chrono::milliseconds(5000));
  EXPECT_EQ(c.out_dir, std::filesystem::path("/base/out"));
  EXPECT_EQ(c.curve_step, 50u);
  EXPECT_TRUE(c.plot);
  EXPECT_DOUBLE_EQ(c.settings.top_p, 0.9);
  EXPECT_DOUBLE_EQ(c.settings.vermcts.c_uct, 2.0);
  EXPECT_EQ(c.settings.whole.per_sample_token_cap, 100u);
  EXPECT_EQ(c.settings.rollout.children_per_expand, 2u);
  EXPECT_EQ(c.settings.reflexion.max_rounds, 7u);
  EXPECT_EQ(c.settings.reflexion.instruction, "Again.");
}

TEST(Config, DefaultSeedsAndSampling) {
  ExperimentConfig c;
  c.n = 3;
  c.base_seed = 10;
  EXPECT_EQ(c.run_seeds(), (std::vector<std::uint64_t>{10, 11, 12}));
  const MethodSettings s;
  EXPECT_DOUBLE_EQ(s.sampling_for(Method::kVerMcts).temperature, 1.0);
  EXPECT_DOUBLE_EQ(s.sampling_for(Method::kWhole).temperature, 0.6);
  EXPECT_DOUBLE_EQ(s.sampling_for(Method::kRollout).temperature, 0.8);
  EXPECT_DOUBLE_EQ(s.sampling_for(Method::kReflexion).temperature, 0.4);
  EXPECT_DOUBLE_EQ(s.sampling_for(Method::kReflexion).top_p, 0.95);
}

TEST(Config, RejectsUnknownAndMistypedKeys) {
  try {
    experiment_config_from_json(json{{"budget", 3}});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "unknown config key 'budget'");
  }
  try {
    experiment_config_from_json(json{{"settings", {{"vermcts", {{"cuct", 1}}}}}});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "unknown config key 'settings.vermcts.cuct'");
  }
  EXPECT_THROW(experiment_config_from_json(json{{"n", "many"}}), ConfigError);
  EXPECT_THROW(experiment_config_from_json(json{{"methods", {"beam"}}}), ConfigError);
  EXPECT_THROW(experiment_config_from_json(json{{"wall_clock_seconds", 0}}), ConfigError);
  EXPECT_THROW(experiment_config_from_json(json::array()), ConfigError);
}

TEST(Config, LoadsFilesRelativeToThemselves) {
  TempDir dir;
  write_file(dir.path() / "cfg" / "c.json", R"({"suite": "../p", "out_dir": "o"})");
  const ExperimentConfig c = load_experiment_config(dir.path() / "cfg" / "c.json");
  EXPECT_EQ(c.suite, dir.path() / "cfg" / "../p");
  EXPECT_EQ(c.out_dir, dir.path() / "cfg" / "o");
  write_file(dir.path() / "bad.json", "{");
  EXPECT_THROW(load_experiment_config(dir.path() / "bad.json"), ConfigError);
  EXPECT_THROW(load_experiment_config(dir.path() / "none.json"), ConfigError);
}

TEST(Config, JsonRedactsApiKey) {
  ExperimentConfig c;
  HttpEndpoint ep;
  ep.base_url = "http://localhost:1";
  ep.api_key = "sk-secret";
  c.generator.kind = GeneratorKind::kHttpLlm;
  c.generator.endpoint = ep;
  const json j = to_json(c);
  EXPECT_EQ(j["generator"]["endpoint"]["api_key"], "<redacted>");
  EXPECT_EQ(j.dump().find("sk-secret"), std::string::npos);
  EXPECT_EQ(j["settings"]["vermcts"]["c_uct"], 3.0);
  EXPECT_TRUE(j["wall_clock_seconds"].is_null());
  const ExperimentConfig back = experiment_config_from_json(j);
  EXPECT_EQ(back.n, c.n);
  EXPECT_EQ(back.methods, c.methods);
}

TEST(Plan, ValidatesBeforeRunning) {
  TempDir dir;
  ExperimentConfig c = toy_config(dir.path());
  const ExperimentPlan plan = plan_experiment(c);
  EXPECT_EQ(plan.problems.size(), 2u);
  EXPECT_EQ(plan.verifiers.size(), 1u);
  EXPECT_TRUE(plan.verifiers.count(Language::kToy));

  auto expect_error = [](ExperimentConfig bad, const std::string& fragment) {
    try {
      plan_experiment(bad);
      ADD_FAILURE() << "no error for " << fragment;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
  };
  ExperimentConfig bad = c;
  bad.n = 0;
  expect_error(bad, "n must be positive");
  bad = c;
  bad.seeds = {1};
  expect_error(bad, "seeds must list exactly n = 2 seeds");
  bad.seeds = {1, 1};
  expect_error(bad, "seeds must be distinct");
  bad = c;
  bad.problems = {"nope"};
  expect_error(bad, "unknown problem 'nope'");
  bad = c;
  bad.suite = dir.path() / "missing";
  expect_error(bad, "problem suite not found");
  bad = c;
  bad.generator.kind = GeneratorKind::kScripted;
  expect_error(bad, "no script for problem 'toy_single_assert'");
  bad = c;
  bad.methods.clear();
  expect_error(bad, "no methods selected");
  bad = c;
  bad.settings.vermcts.p_widen = 1.5;
  expect_error(bad, "p_widen");
}

TEST(Experiment, WritesLogsAndCurves) {
  TempDir dir;
  ExperimentConfig c = toy_config(dir.path() / "out");
  c.workers = 3;
  c.plot = true;
  const ExperimentResult r = run_experiment(c);
  EXPECT_EQ(r.logs.size(), 2u * 4u * 2u);
  for (const auto& log : r.logs) {
    EXPECT_LE(log.outcome.total_tokens, c.max_tokens + 64);
    EXPECT_EQ(log.outcome.total_tokens, log.event_tokens());
    EXPECT_EQ(log.config["generator"], "grammar");
    EXPECT_TRUE(std::filesystem::exists(
        run_log_path(c.out_dir, log.problem_id, log.method, log.seed)));
  }
  EXPECT_TRUE(std::filesystem::exists(c.out_dir / "config.json"));
  EXPECT_TRUE(std::filesystem::exists(c.out_dir / "pass_at_T_toy_constant.svg"));
  const std::string csv = read_text(c.out_dir / "curves.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kCurveCsvHeader);
  const std::string tree = read_text(c.out_dir / "tree_stats.csv");
  EXPECT_EQ(tree.substr(0, tree.find('\n')), kTreeCsvHeader);
  EXPECT_EQ(r.curves.size(), 2u * 4u + 4u);

  const std::vector<RunLog> back = read_run_logs(c.out_dir / "runs");
  EXPECT_EQ(back.size(), r.logs.size());
}

TEST(Experiment, SeededRerunsMatch) {
  TempDir a;
  TempDir b;
  ExperimentConfig ca = toy_config(a.path());
  ExperimentConfig cb = toy_config(b.path());
  cb.workers = 4;
  const ExperimentResult ra = run_experiment(ca);
  const ExperimentResult rb = run_experiment(cb);
  ASSERT_EQ(ra.logs.size(), rb.logs.size());
  for (std::size_t i = 0; i < ra.logs.size(); ++i)
    EXPECT_EQ(normalized_line(ra.logs[i]), normalized_line(rb.logs[i]));
  EXPECT_EQ(read_text(a.path() / "curves.csv"), read_text(b.path() / "curves.csv"));
}

TEST(RunLogs, CorruptLineNamesFileAndLine) {
  TempDir dir;
  RunLog log;
  log.problem_id = "p";
  log.method = "whole";
  write_run_log(run_log_path(dir.path(), "p", "whole", 1), log);
  EXPECT_EQ(read_run_logs(dir.path() / "runs").size(), 1u);
  const auto bad = dir.path() / "runs" / "p" / "whole" / "seed-2.jsonl";
  write_file(bad, "\n{\"problem_id\": 1}\n");
  try {
    read_run_logs(dir.path() / "runs");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_EQ(std::string(e.what()).rfind(bad.string() + ":2: ", 0), 0u) << e.what();
  }
  EXPECT_THROW(read_run_logs(dir.path() / "nothing"), ConfigError);
}

TEST(Export, CsvLayout) {
  const std::vector<PassCurve> curves = {PassCurve{"p", "whole", 2, {{100, 0.5, 0.1, 0.9}}}};
  EXPECT_EQ(curves_csv(curves), std::string(kCurveCsvHeader) + "\np,whole,100,0.500000,0.100000,0.900000\n");
  const std::vector<TreeStatPoint> series = {TreeStatPoint{"p", 100, 2.5, 2.0, 1.0}};
  EXPECT_EQ(tree_stats_csv(series), std::string(kTreeCsvHeader) + "\np,100,2.500,2.000,1.000\n");
  const std::string svg = curves_svg(curves, "p");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("whole"), std::string::npos);
}

}  // namespace
}  // namespace vermcts
