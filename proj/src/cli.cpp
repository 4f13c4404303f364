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

#include "vermcts/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <optional>

#include "vermcts/errors.hpp"
#include "vermcts/experiment.hpp"
#include "vermcts/export.hpp"

namespace vermcts {

namespace {

struct Overrides {
  std::string config;
  std::string suite;
  std::string problem;
  std::string method;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_tokens;
  std::optional<std::size_t> n;
  std::optional<std::size_t> workers;
  std::string endpoint;
  std::string generator;
  std::string script;
  std::string dafny_path;
  std::string coq_path;
  std::string out_dir;
  bool plot = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Experiment config file (JSON)");
  cmd->add_option("--suite", o.suite, "Problem suite directory");
  cmd->add_option("--max-tokens", o.max_tokens, "Token budget per run");
  cmd->add_option("--endpoint", o.endpoint, "Completion endpoint base URL");
  cmd->add_option("--generator", o.generator, "grammar, scripted or http-llm");
  cmd->add_option("--dafny-path", o.dafny_path, "Dafny binary");
  cmd->add_option("--coq-path", o.coq_path, "coqc binary");
  cmd->add_option("--out-dir", o.out_dir, "Output directory");
  cmd->add_flag("--plot", o.plot, "Also write SVG plots");
}

ExperimentConfig resolve_config(const Overrides& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_experiment_config(o.config);
  if (!o.suite.empty()) c.suite = o.suite;
  if (!o.problem.empty()) c.problems = {o.problem};
  if (!o.method.empty()) c.methods = {parse_method(o.method)};
  if (o.max_tokens) c.max_tokens = *o.max_tokens;
  if (o.n) c.n = *o.n;
  if (o.workers) c.workers = *o.workers;
  if (!o.endpoint.empty()) {
    HttpEndpoint ep = c.generator.endpoint.value_or(HttpEndpoint{});
    ep.base_url = o.endpoint;
    c.generator.endpoint = ep;
    if (o.generator.empty()) c.generator.kind = GeneratorKind::kHttpLlm;
  }
  if (!o.script.empty()) {
    if (o.problem.empty()) throw ConfigError("--script needs --problem");
    c.scripts[o.problem] = o.script;
    if (o.generator.empty()) c.generator.kind = GeneratorKind::kScripted;
  }
  if (!o.generator.empty()) c.generator.kind = parse_generator_kind(o.generator);
  if (!o.dafny_path.empty()) c.dafny_path = o.dafny_path;
  if (!o.coq_path.empty()) c.coq_path = o.coq_path;
  if (!o.out_dir.empty()) c.out_dir = o.out_dir;
  if (o.plot) c.plot = true;
  return c;
}

void echo(std::ostream& out, const nlohmann::json& config) {
  out << "resolved config:\n" << config.dump(2) << "\n";
}

std::string extension(Language language) {
  switch (language) {
    case Language::kDafny: return ".dfy";
    case Language::kCoq: return ".v";
    case Language::kToy: return ".toy";
  }
  return ".txt";
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void print_summary(std::ostream& out, const std::vector<PassCurve>& curves) {
  out << "problem,method,runs,T,pass_rate,wilson_lo,wilson_hi\n";
  for (const auto& c : curves) {
    if (c.points.empty()) continue;
    const CurvePoint& p = c.points.back();
    out << c.problem << "," << c.method << "," << c.runs << "," << p.tokens << ","
        << fixed(p.pass_rate, 4) << "," << fixed(p.wilson_lo, 4) << "," << fixed(p.wilson_hi, 4)
        << "\n";
  }
}

int cmd_run(const Overrides& o, std::ostream& out) {
  if (o.problem.empty()) throw ConfigError("run: --problem is required");
  ExperimentConfig c = resolve_config(o);
  if (c.methods.size() != 1) c.methods = {Method::kVerMcts};
  const std::uint64_t seed = o.seed.value_or(c.run_seeds().front());
  c.n = 1;
  c.seeds = {seed};
  nlohmann::json echoed = to_json(c);
  echoed["seed"] = seed;
  echo(out, echoed);

  const ExperimentPlan plan = plan_experiment(c);
  const ProblemSpec& problem = plan.problems.front();
  const Method method = c.methods.front();
  const RunLog log = run_single(problem, method, seed, c, plan);

  const auto log_path = run_log_path(c.out_dir, problem.id, to_string(method), seed);
  write_run_log(log_path, log);
  const bool ok = log.outcome.status == RunStatus::kSuccess;
  out << "status: " << (ok ? "success" : "exhausted") << "\n";
  out << "total_tokens: " << log.outcome.total_tokens << "\n";
  if (!ok) out << "reason: " << log.outcome.reason << "\n";
  out << "run_log: " << log_path.string() << "\n";
  if (ok) {
    const auto program_path = c.out_dir / "programs" / problem.id / std::string(to_string(method)) /
                              ("seed-" + std::to_string(seed) + extension(problem.language));
    std::filesystem::create_directories(program_path.parent_path());
    std::ofstream(program_path, std::ios::binary) << log.outcome.program;
    out << "program: " << program_path.string() << "\n";
  }
  return ok ? kExitSuccess : kExitExhausted;
}

int cmd_experiment(const Overrides& o, std::ostream& out) {
  ExperimentConfig c = resolve_config(o);
  if (o.seed) c.base_seed = *o.seed;
  echo(out, to_json(c));
  const ExperimentResult r = run_experiment(c);
  print_summary(out, r.curves);
  out << "runs written under " << (c.out_dir / "runs").string() << "\n";
  return kExitSuccess;
}

int cmd_report(const Overrides& o, std::size_t step, std::ostream& out) {
  ExperimentConfig c = resolve_config(o);
  if (o.out_dir.empty() && o.config.empty()) throw ConfigError("report: --out-dir is required");
  nlohmann::json echoed{{"out_dir", c.out_dir.string()}, {"curve_step", step}, {"plot", c.plot}};
  std::vector<RunLog> logs;
  try {
    logs = read_run_logs(c.out_dir / "runs");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (logs.empty()) throw ConfigError("no run logs under " + (c.out_dir / "runs").string());
  std::size_t max_tokens = 0;
  if (o.max_tokens) {
    max_tokens = *o.max_tokens;
  } else {
    for (const auto& l : logs)
      max_tokens = std::max(max_tokens, l.config.value("max_tokens", std::size_t{0}));
  }
  echoed["max_tokens"] = max_tokens;
  echo(out, echoed);
  const auto grid = token_grid(max_tokens, step);
  const auto curves = compute_curves(logs, grid);
  const auto series = tree_stat_series(logs, grid);
  for (const auto& p : export_curves(curves, series, c.out_dir, c.plot))
    out << "wrote " << p.string() << "\n";
  print_summary(out, curves);
  return kExitSuccess;
}

int cmd_validate(const Overrides& o, std::ostream& out) {
  ExperimentConfig c = resolve_config(o);
  echo(out, to_json(c));
  const ExperimentPlan plan = plan_experiment(c);
  out << "ok: " << plan.problems.size() << " problems";
  for (const auto& [language, spec] : plan.verifiers) {
    out << ", " << to_string(language);
    if (spec.binary_path) out << " (" << spec.binary_path->string() << ")";
  }
  out << "\n";
  return kExitSuccess;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Verifier-guided tree search for verified program synthesis", "vermcts"};
  app.require_subcommand(1);
  Overrides o;
  std::size_t step = 100;

  CLI::App* run = app.add_subcommand("run", "One seeded run of one method on one problem");
  add_common(run, o);
  run->add_option("--problem", o.problem, "Problem id")->required();
  run->add_option("--method", o.method, "vermcts, whole, rollout or reflexion");
  run->add_option("--seed", o.seed, "Run seed");
  run->add_option("--script", o.script, "Chunk script for the scripted generator");

  CLI::App* experiment = app.add_subcommand("experiment", "Run the problem x method x seed matrix");
  add_common(experiment, o);
  experiment->add_option("--problem", o.problem, "Restrict to one problem");
  experiment->add_option("--method", o.method, "Restrict to one method");
  experiment->add_option("--seed", o.seed, "Base seed");
  experiment->add_option("-n,--runs", o.n, "Runs per problem and method");
  experiment->add_option("--workers", o.workers, "Concurrent runs");

  CLI::App* report = app.add_subcommand("report", "Recompute curves from persisted run logs");
  add_common(report, o);
  report->add_option("--step", step, "Token grid step")->check(CLI::PositiveNumber);

  CLI::App* validate = app.add_subcommand("validate", "Check a configuration without running");
  add_common(validate, o);
  validate->add_option("--problem", o.problem, "Restrict to one problem");
  validate->add_option("--method", o.method, "Restrict to one method");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(o, out);
    if (experiment->parsed()) return cmd_experiment(o, out);
    if (report->parsed()) return cmd_report(o, step, out);
    if (validate->parsed()) return cmd_validate(o, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ProblemFormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}

}  // namespace vermcts
