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

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "vermcts/errors.hpp"
#include "vermcts/export.hpp"
#include "vermcts/text.hpp"

namespace vermcts {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& j, std::string_view key, T& out, std::string_view scope) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(scope) + std::string(key) + ": " + e.what());
  }
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                std::string_view scope) {
  if (!j.is_object()) throw ConfigError(std::string(scope) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown config key '" + std::string(scope) + key + "'");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_absolute() || base.empty()) return path;
  return base / path;
}

std::chrono::milliseconds seconds_to_ms(double seconds, std::string_view key) {
  if (!(seconds > 0)) throw ConfigError(std::string(key) + " must be positive");
  return std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
}

void read_search(const json& j, SearchParams& p) {
  check_keys(j, {"temperature", "c_uct", "p_widen", "expansion_depth_limit"}, "settings.vermcts.");
  read(j, "temperature", p.sampling.temperature, "settings.vermcts.");
  read(j, "c_uct", p.c_uct, "settings.vermcts.");
  read(j, "p_widen", p.p_widen, "settings.vermcts.");
  read(j, "expansion_depth_limit", p.expansion_depth_limit, "settings.vermcts.");
}

void read_settings(const json& j, MethodSettings& s) {
  check_keys(j, {"top_p", "max_action_tokens", "vermcts", "whole", "rollout", "reflexion"},
             "settings.");
  read(j, "top_p", s.top_p, "settings.");
  read(j, "max_action_tokens", s.max_action_tokens, "settings.");
  if (j.contains("vermcts")) read_search(j.at("vermcts"), s.vermcts);
  if (j.contains("whole")) {
    const json& w = j.at("whole");
    check_keys(w, {"temperature", "per_sample_token_cap"}, "settings.whole.");
    read(w, "temperature", s.whole.temperature, "settings.whole.");
    if (w.contains("per_sample_token_cap") && !w.at("per_sample_token_cap").is_null()) {
      std::size_t cap = 0;
      read(w, "per_sample_token_cap", cap, "settings.whole.");
      s.whole.per_sample_token_cap = cap;
    }
  }
  if (j.contains("rollout")) {
    const json& r = j.at("rollout");
    check_keys(r, {"temperature", "c_uct", "children_per_expand", "rollout_action_cap"},
               "settings.rollout.");
    read(r, "temperature", s.rollout.temperature, "settings.rollout.");
    read(r, "c_uct", s.rollout.c_uct, "settings.rollout.");
    read(r, "children_per_expand", s.rollout.children_per_expand, "settings.rollout.");
    read(r, "rollout_action_cap", s.rollout.rollout_action_cap, "settings.rollout.");
  }
  if (j.contains("reflexion")) {
    const json& r = j.at("reflexion");
    check_keys(r, {"temperature", "max_context_chars", "max_rounds", "instruction"},
               "settings.reflexion.");
    read(r, "temperature", s.reflexion.temperature, "settings.reflexion.");
    read(r, "max_context_chars", s.reflexion.max_context_chars, "settings.reflexion.");
    read(r, "max_rounds", s.reflexion.max_rounds, "settings.reflexion.");
    read(r, "instruction", s.reflexion.instruction, "settings.reflexion.");
  }
}

void read_generator(const json& j, GeneratorSpec& g) {
  check_keys(j, {"kind", "grammar_seed", "depth_cap", "weights", "endpoint"}, "generator.");
  if (j.contains("kind")) {
    std::string kind;
    read(j, "kind", kind, "generator.");
    g.kind = parse_generator_kind(kind);
  }
  if (j.contains("grammar_seed") && !j.at("grammar_seed").is_null()) {
    std::uint64_t seed = 0;
    read(j, "grammar_seed", seed, "generator.");
    g.grammar_seed = seed;
  }
  read(j, "depth_cap", g.grammar_depth_cap, "generator.");
  if (j.contains("weights")) {
    const json& w = j.at("weights");
    check_keys(w, {"def", "assert", "qed", "plus", "ident", "identifiers", "max_literal"},
               "generator.weights.");
    read(w, "def", g.grammar.def, "generator.weights.");
    read(w, "assert", g.grammar.assert_, "generator.weights.");
    read(w, "qed", g.grammar.qed, "generator.weights.");
    read(w, "plus", g.grammar.plus, "generator.weights.");
    read(w, "ident", g.grammar.ident, "generator.weights.");
    read(w, "identifiers", g.grammar.identifiers, "generator.weights.");
    read(w, "max_literal", g.grammar.max_literal, "generator.weights.");
  }
  if (j.contains("endpoint")) {
    const json& e = j.at("endpoint");
    check_keys(e, {"base_url", "path", "api_key", "model", "text_pointer", "usage_pointer",
                   "server_side_stop", "request_timeout_seconds", "max_retries",
                   "initial_backoff_ms"},
               "generator.endpoint.");
    HttpEndpoint ep = g.endpoint.value_or(HttpEndpoint{});
    read(e, "base_url", ep.base_url, "generator.endpoint.");
    read(e, "path", ep.path, "generator.endpoint.");
    read(e, "api_key", ep.api_key, "generator.endpoint.");
    read(e, "model", ep.model, "generator.endpoint.");
    read(e, "text_pointer", ep.text_pointer, "generator.endpoint.");
    read(e, "usage_pointer", ep.usage_pointer, "generator.endpoint.");
    read(e, "server_side_stop", ep.server_side_stop, "generator.endpoint.");
    if (e.contains("request_timeout_seconds")) {
      double s = 0;
      read(e, "request_timeout_seconds", s, "generator.endpoint.");
      ep.request_timeout = seconds_to_ms(s, "generator.endpoint.request_timeout_seconds");
    }
    read(e, "max_retries", ep.max_retries, "generator.endpoint.");
    if (e.contains("initial_backoff_ms")) {
      long long ms = 0;
      read(e, "initial_backoff_ms", ms, "generator.endpoint.");
      ep.initial_backoff = std::chrono::milliseconds(ms);
    }
    g.endpoint = ep;
  }
}

json generator_json(const GeneratorSpec& g) {
  json j{{"kind", to_string(g.kind)}, {"depth_cap", g.grammar_depth_cap}};
  j["grammar_seed"] = g.grammar_seed ? json(*g.grammar_seed) : json();
  j["weights"] = {{"def", g.grammar.def},       {"assert", g.grammar.assert_},
                  {"qed", g.grammar.qed},       {"plus", g.grammar.plus},
                  {"ident", g.grammar.ident},   {"identifiers", g.grammar.identifiers},
                  {"max_literal", g.grammar.max_literal}};
  if (g.endpoint) {
    const HttpEndpoint& e = *g.endpoint;
    j["endpoint"] = {{"base_url", e.base_url},
                     {"path", e.path},
                     {"api_key", e.api_key.empty() ? "" : "<redacted>"},
                     {"model", e.model},
                     {"text_pointer", e.text_pointer},
                     {"usage_pointer", e.usage_pointer},
                     {"server_side_stop", e.server_side_stop},
                     {"request_timeout_seconds", e.request_timeout.count() / 1000.0},
                     {"max_retries", e.max_retries},
                     {"initial_backoff_ms", e.initial_backoff.count()}};
  }
  return j;
}

}  // namespace

SamplingParams MethodSettings::sampling_for(Method method) const {
  SamplingParams s;
  s.top_p = top_p;
  s.max_action_tokens = max_action_tokens;
  switch (method) {
    case Method::kVerMcts: s.temperature = vermcts.sampling.temperature; break;
    case Method::kWhole: s.temperature = whole.temperature; break;
    case Method::kRollout: s.temperature = rollout.temperature; break;
    case Method::kReflexion: s.temperature = reflexion.temperature; break;
  }
  return s;
}

json to_json(const MethodSettings& settings) {
  return {{"top_p", settings.top_p},
          {"max_action_tokens", settings.max_action_tokens},
          {"vermcts",
           {{"temperature", settings.vermcts.sampling.temperature},
            {"c_uct", settings.vermcts.c_uct},
            {"p_widen", settings.vermcts.p_widen},
            {"expansion_depth_limit", settings.vermcts.expansion_depth_limit}}},
          {"whole", to_json(settings.whole)},
          {"rollout", to_json(settings.rollout)},
          {"reflexion", to_json(settings.reflexion)}};
}

std::vector<std::uint64_t> ExperimentConfig::run_seeds() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(base_seed + i);
  return out;
}

ExperimentConfig experiment_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j,
             {"suite", "problems", "methods", "n", "max_tokens", "max_actions",
              "wall_clock_seconds", "base_seed", "seeds", "generator", "scripts", "dafny_path",
              "coq_path", "verifier_timeout_seconds", "workers", "out_dir", "curve_step", "plot",
              "settings"},
             "");
  ExperimentConfig c;
  std::string path;
  if (j.contains("suite")) {
    read(j, "suite", path, "");
    c.suite = resolve(base_dir, path);
  }
  read(j, "problems", c.problems, "");
  if (j.contains("methods")) {
    std::vector<std::string> names;
    read(j, "methods", names, "");
    c.methods.clear();
    for (const auto& m : names) c.methods.push_back(parse_method(m));
  }
  read(j, "n", c.n, "");
  read(j, "max_tokens", c.max_tokens, "");
  read(j, "max_actions", c.max_actions, "");
  if (j.contains("wall_clock_seconds") && !j.at("wall_clock_seconds").is_null()) {
    double s = 0;
    read(j, "wall_clock_seconds", s, "");
    c.wall_clock_limit = seconds_to_ms(s, "wall_clock_seconds");
  }
  read(j, "base_seed", c.base_seed, "");
  read(j, "seeds", c.seeds, "");
  if (j.contains("generator")) read_generator(j.at("generator"), c.generator);
  if (j.contains("scripts")) {
    std::map<std::string, std::string> scripts;
    read(j, "scripts", scripts, "");
    for (const auto& [id, p] : scripts) c.scripts[id] = resolve(base_dir, p);
  }
  if (j.contains("dafny_path") && !j.at("dafny_path").is_null()) {
    read(j, "dafny_path", path, "");
    c.dafny_path = path;
  }
  if (j.contains("coq_path") && !j.at("coq_path").is_null()) {
    read(j, "coq_path", path, "");
    c.coq_path = path;
  }
  if (j.contains("verifier_timeout_seconds")) {
    double s = 0;
    read(j, "verifier_timeout_seconds", s, "");
    c.verifier_timeout = seconds_to_ms(s, "verifier_timeout_seconds");
  }
  read(j, "workers", c.workers, "");
  if (j.contains("out_dir")) {
    read(j, "out_dir", path, "");
    c.out_dir = resolve(base_dir, path);
  }
  read(j, "curve_step", c.curve_step, "");
  read(j, "plot", c.plot, "");
  if (j.contains("settings")) read_settings(j.at("settings"), c.settings);
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return experiment_config_from_json(j, path.parent_path());
}

json to_json(const ExperimentConfig& c) {
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  json scripts = json::object();
  for (const auto& [id, p] : c.scripts) scripts[id] = p.string();
  json j{{"suite", c.suite.string()},
         {"problems", c.problems},
         {"methods", methods},
         {"n", c.n},
         {"max_tokens", c.max_tokens},
         {"max_actions", c.max_actions},
         {"base_seed", c.base_seed},
         {"seeds", c.seeds},
         {"generator", generator_json(c.generator)},
         {"scripts", scripts},
         {"verifier_timeout_seconds", c.verifier_timeout.count() / 1000.0},
         {"workers", c.workers},
         {"out_dir", c.out_dir.string()},
         {"curve_step", c.curve_step},
         {"plot", c.plot},
         {"settings", to_json(c.settings)}};
  j["wall_clock_seconds"] =
      c.wall_clock_limit ? json(c.wall_clock_limit->count() / 1000.0) : json();
  j["dafny_path"] = c.dafny_path ? json(c.dafny_path->string()) : json();
  j["coq_path"] = c.coq_path ? json(c.coq_path->string()) : json();
  return j;
}

ExperimentPlan plan_experiment(const ExperimentConfig& config) {
  if (config.n == 0) throw ConfigError("n must be positive");
  if (config.workers == 0) throw ConfigError("workers must be positive");
  if (config.curve_step == 0) throw ConfigError("curve_step must be positive");
  if (config.methods.empty()) throw ConfigError("no methods selected");
  if (!config.seeds.empty()) {
    if (config.seeds.size() != config.n)
      throw ConfigError("seeds must list exactly n = " + std::to_string(config.n) + " seeds");
    if (std::set<std::uint64_t>(config.seeds.begin(), config.seeds.end()).size() != config.n)
      throw ConfigError("seeds must be distinct");
  }
  Budget{config.max_tokens, config.max_actions, config.wall_clock_limit}.validate();
  for (Method m : config.methods) config.settings.sampling_for(m).validate();
  SearchParams sp = config.settings.vermcts;
  sp.sampling = config.settings.sampling_for(Method::kVerMcts);
  sp.validate();

  ExperimentPlan plan;
  std::vector<ProblemSpec> suite;
  try {
    suite = load_suite(config.suite);
  } catch (const ProblemFormatError& e) {
    throw ConfigError(e.what());
  }
  if (config.problems.empty()) {
    plan.problems = suite;
  } else {
    for (const auto& id : config.problems) plan.problems.push_back(find_problem(suite, id));
  }
  if (plan.problems.empty()) throw ConfigError("no problems selected");

  GeneratorSpec g = config.generator;
  if (g.kind == GeneratorKind::kScripted) {
    for (const auto& p : plan.problems) {
      const auto it = config.scripts.find(p.id);
      if (it == config.scripts.end())
        throw ConfigError("scripted generator: no script for problem '" + p.id + "'");
      if (!std::filesystem::exists(it->second))
        throw ConfigError("script not found: " + it->second.string());
    }
    g.script = std::vector<std::string>{};
  }
  if (g.kind == GeneratorKind::kHttpLlm) g.endpoint = endpoint_from_env(g.endpoint.value_or(HttpEndpoint{}));
  g.validate();

  for (const auto& p : plan.problems) {
    if (plan.verifiers.count(p.language)) continue;
    std::optional<std::filesystem::path> binary;
    if (p.language == Language::kDafny) binary = config.dafny_path;
    if (p.language == Language::kCoq) binary = config.coq_path;
    VerifierSpec spec = verifier_spec_from_env(p.language, binary);
    spec.timeout = config.verifier_timeout;
    make_verifier(spec);  // resolves the binary now
    plan.verifiers.emplace(p.language, std::move(spec));
  }
  return plan;
}

RunLog run_single(const ProblemSpec& problem, Method method, std::uint64_t seed,
                  const ExperimentConfig& config, const ExperimentPlan& plan) {
  VerifierSpec vspec = plan.verifiers.at(problem.language);
  if (problem.completion_sentinel) vspec.sentinel = *problem.completion_sentinel;
  const std::unique_ptr<Verifier> verifier = make_verifier(vspec);

  GeneratorSpec gspec = config.generator;
  if (gspec.kind == GeneratorKind::kScripted) gspec.script = load_script(config.scripts.at(problem.id));
  const std::unique_ptr<Generator> generator = make_generator(gspec, seed);

  const Budget budget{config.max_tokens, config.max_actions, config.wall_clock_limit};
  SamplingParams sampling = config.settings.sampling_for(method);
  sampling.stop = default_stop_kind(problem.language);
  sampling.sentinel = std::string(effective_sentinel(problem, *verifier));

  RunLog log;
  switch (method) {
    case Method::kVerMcts: {
      SearchParams p = config.settings.vermcts;
      p.budget = budget;
      p.seed = seed;
      p.sampling = sampling;
      log = run_vermcts(problem, *generator, *verifier, p).log;
      break;
    }
    case Method::kWhole:
      log = run_whole_sampling(problem, *generator, *verifier, budget, config.settings.whole, seed,
                               sampling);
      break;
    case Method::kRollout:
      log = run_rollout_mcts(problem, *generator, *verifier, config.settings.rollout, budget, seed,
                             sampling)
                .log;
      break;
    case Method::kReflexion:
      log = run_reflexion(problem, *generator, *verifier, config.settings.reflexion, budget, seed,
                          sampling);
      break;
  }
  log.config["generator"] = to_string(gspec.kind);
  return log;
}

std::filesystem::path run_log_path(const std::filesystem::path& out_dir,
                                   std::string_view problem, std::string_view method,
                                   std::uint64_t seed) {
  return out_dir / "runs" / std::string(problem) / std::string(method) /
         ("seed-" + std::to_string(seed) + ".jsonl");
}

void write_run_log(const std::filesystem::path& path, const RunLog& log) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << serialize_run_log(log) << '\n';
  out.close();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::vector<RunLog> read_run_logs(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    throw ConfigError("run log directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::vector<RunLog> logs;
  for (const auto& f : files) {
    std::ifstream in(f);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (is_blank(line)) continue;
      try {
        logs.push_back(run_log_from_json(json::parse(line)));
      } catch (const std::exception& e) {
        throw std::runtime_error(f.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  return logs;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const ExperimentPlan plan = plan_experiment(config);
  const std::vector<std::uint64_t> seeds = config.run_seeds();

  struct Job {
    const ProblemSpec* problem;
    Method method;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& p : plan.problems)
    for (Method m : config.methods)
      for (std::uint64_t s : seeds) jobs.push_back(Job{&p, m, s});

  std::filesystem::create_directories(config.out_dir);
  {
    std::ofstream out(config.out_dir / "config.json");
    out << to_json(config).dump(2) << '\n';
  }

  std::vector<RunLog> logs(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (error) return;
      }
      try {
        const Job& job = jobs[i];
        logs[i] = run_single(*job.problem, job.method, job.seed, config, plan);
        write_run_log(run_log_path(config.out_dir, job.problem->id, to_string(job.method), job.seed),
                      logs[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(config.workers, jobs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  ExperimentResult result;
  result.logs = std::move(logs);
  const std::vector<std::size_t> grid = token_grid(config.max_tokens, config.curve_step);
  result.curves = compute_curves(result.logs, grid);
  result.tree_series = tree_stat_series(result.logs, grid);
  export_curves(result.curves, result.tree_series, config.out_dir, config.plot);
  return result;
}

}  // namespace vermcts
