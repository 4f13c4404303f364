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

#include "vermcts/baselines.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "vermcts/errors.hpp"

namespace vermcts {

namespace {

constexpr std::size_t kStallLimit = 1000;

bool program_ended(const State& state, const ProblemSpec& problem, const Verifier& verifier) {
  const std::string_view sentinel = effective_sentinel(problem, verifier);
  if (!sentinel.empty() && state.program().find(sentinel) != std::string_view::npos) return true;
  return verifier.ends_program(program_of(state, problem, verifier));
}

RunLog start_log(const ProblemSpec& problem, Method method, std::uint64_t seed,
                 nlohmann::json config) {
  RunLog log;
  log.problem_id = problem.id;
  log.method = std::string(to_string(method));
  log.seed = seed;
  log.config = std::move(config);
  log.started_at = utc_timestamp_now();
  return log;
}

nlohmann::json budget_json(const Budget& budget, const SamplingParams& sampling) {
  nlohmann::json j{{"max_tokens", budget.max_tokens},
                   {"max_actions", budget.max_actions},
                   {"top_p", sampling.top_p},
                   {"max_action_tokens", sampling.max_action_tokens}};
  if (budget.wall_clock_limit) j["wall_clock_ms"] = budget.wall_clock_limit->count();
  return j;
}

void finish(RunLog& log, const TokenMeter& meter) {
  log.outcome.total_tokens = meter.spent();
  log.elapsed_seconds = meter.elapsed_seconds();
}

}  // namespace

nlohmann::json to_json(const WholeParams& params) {
  nlohmann::json j{{"temperature", params.temperature}};
  j["per_sample_token_cap"] =
      params.per_sample_token_cap ? nlohmann::json(*params.per_sample_token_cap) : nlohmann::json();
  return j;
}

nlohmann::json to_json(const RolloutParams& params) {
  return {{"children_per_expand", params.children_per_expand},
          {"rollout_action_cap", params.rollout_action_cap},
          {"c_uct", params.c_uct},
          {"temperature", params.temperature}};
}

nlohmann::json to_json(const ReflexionParams& params) {
  return {{"temperature", params.temperature},
          {"max_context_chars", params.max_context_chars},
          {"max_rounds", params.max_rounds},
          {"instruction", params.instruction}};
}

Sample sample_program(const State& prefix, Generator& generator, const Verifier& verifier,
                      const ProblemSpec& problem, const SamplingParams& sampling,
                      std::size_t token_cap, std::size_t max_actions,
                      std::mt19937_64& rng, TokenMeter& meter) {
  Sample s{prefix, 0, false, false};
  for (std::size_t actions = 0; actions < max_actions && s.tokens < token_cap; ++actions) {
    if (meter.exhausted()) break;
    SamplingParams sp = sampling;
    sp.seed = rng();
    Action a;
    try {
      a = generator.next_chunk(s.state, sp);
    } catch (const GeneratorError& e) {
      if (e.kind() != GeneratorError::Kind::kExhausted) throw;
      s.generator_exhausted = true;
      break;
    }
    s.tokens += a.token_count;
    meter.add(a.token_count);
    s.state = transition(s.state, a);
    if (program_ended(s.state, problem, verifier)) {
      s.ended = true;
      break;
    }
  }
  return s;
}

RunLog run_whole_sampling(const ProblemSpec& problem, Generator& generator,
                          const Verifier& verifier, const Budget& budget,
                          const WholeParams& params, std::uint64_t seed,
                          const SamplingParams& sampling) {
  budget.validate();
  SamplingParams sp = sampling;
  sp.temperature = params.temperature;
  sp.validate();
  const std::size_t cap = params.per_sample_token_cap.value_or(budget.max_tokens);
  if (cap == 0 && budget.max_tokens > 0) throw ConfigError("per_sample_token_cap must be positive");

  nlohmann::json config = budget_json(budget, sp);
  config["whole"] = to_json(params);
  RunLog log = start_log(problem, Method::kWhole, seed, std::move(config));
  TokenMeter meter(budget.max_tokens, budget.wall_clock_limit);
  std::mt19937_64 rng(seed);
  const State prompt = render_prompt(problem);

  std::size_t iteration = 0;
  std::size_t stalled = 0;
  while (true) {
    if (meter.exhausted()) {
      log.outcome.reason = meter.reason();
      break;
    }
    const std::size_t before = meter.spent();
    Sample s;
    SuccessCheck ok;
    try {
      s = sample_program(prompt, generator, verifier, problem, sp, cap, budget.max_actions, rng,
                         meter);
      if (!s.generator_exhausted || s.state.size() > prompt.size())
        ok = check_success(s.state, problem, verifier);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      ok = SuccessCheck{false, e.what()};
    }
    const std::size_t spent = meter.spent() - before;
    log.events.push_back(RunEvent{++iteration, spent, ok.passed ? 1 : -1, std::nullopt});
    if (ok.passed) {
      log.outcome.status = RunStatus::kSuccess;
      log.outcome.program = program_of(s.state, problem, verifier);
      break;
    }
    if (s.generator_exhausted) {
      log.outcome.reason = "generator exhausted";
      break;
    }
    stalled = spent == 0 ? stalled + 1 : 0;
    if (stalled >= kStallLimit) {
      log.outcome.reason = "stalled";
      break;
    }
  }
  finish(log, meter);
  return log;
}

RolloutRun run_rollout_mcts(const ProblemSpec& problem, Generator& generator,
                            const Verifier& verifier, const RolloutParams& params,
                            const Budget& budget, std::uint64_t seed,
                            const SamplingParams& sampling) {
  budget.validate();
  if (params.children_per_expand == 0) throw ConfigError("children_per_expand must be positive");
  if (params.rollout_action_cap == 0) throw ConfigError("rollout_action_cap must be positive");
  if (!(params.c_uct > 0.0)) throw ConfigError("rollout c_uct must be positive");
  SamplingParams sp = sampling;
  sp.temperature = params.temperature;
  sp.validate();

  nlohmann::json config = budget_json(budget, sp);
  config["rollout"] = to_json(params);
  RolloutRun run;
  RunLog& log = run.log;
  log = start_log(problem, Method::kRollout, seed, std::move(config));
  TokenMeter meter(budget.max_tokens, budget.wall_clock_limit);
  std::mt19937_64 rng(seed);
  auto& tree = run.tree;
  RolloutNode root;
  root.state = render_prompt(problem);
  tree.push_back(std::move(root));

  // Reward of a finished (or abandoned) program.
  auto judge = [&](const State& state, bool ended) -> std::pair<Score, bool> {
    const SuccessCheck s = check_success(state, problem, verifier);
    if (s.passed) return {Score::kPass, true};
    return {ended ? Score::kFail : Score::kNone, false};
  };

  auto uct = [&](const RolloutNode& child, std::uint64_t parent_visits) {
    if (child.visits == 0) return std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(child.visits);
    const double p = static_cast<double>(std::max<std::uint64_t>(parent_visits, 1));
    return child.value_sum / n + params.c_uct * std::sqrt(std::log(p) / n);
  };

  std::size_t iteration = 0;
  std::size_t stalled = 0;
  bool exhausted_generator = false;
  while (true) {
    if (meter.exhausted()) {
      log.outcome.reason = meter.reason();
      break;
    }
    const std::size_t before = meter.spent();

    std::vector<std::size_t> path{0};
    std::size_t cur = 0;
    while (!tree[cur].children.empty() && !tree[cur].terminal) {
      std::size_t best = tree[cur].children.front();
      double best_score = uct(tree[best], tree[cur].visits);
      for (std::size_t c : tree[cur].children) {
        const double s = uct(tree[c], tree[cur].visits);
        if (s > best_score) {
          best = c;
          best_score = s;
        }
      }
      cur = best;
      path.push_back(cur);
    }

    Score reward = Score::kNone;
    bool solved = false;
    State solved_state;
    try {
      if (tree[cur].terminal) {
        reward = tree[cur].terminal_value.value_or(Score::kNone);
      } else {
        if (tree[cur].visits > 0 || cur == 0) {
          // Expand into k children, one chunk each.
          for (std::size_t i = 0; i < params.children_per_expand && !meter.exhausted(); ++i) {
            SamplingParams csp = sp;
            csp.seed = rng();
            Action a = generator.next_chunk(tree[cur].state, csp);
            meter.add(a.token_count);
            RolloutNode child;
            child.state = transition(tree[cur].state, a);
            child.parent = cur;
            child.actions = tree[cur].actions + 1;
            const bool ended = program_ended(child.state, problem, verifier);
            if (ended || child.actions >= budget.max_actions) {
              child.terminal = true;
              const auto [value, passed] = judge(child.state, ended);
              child.terminal_value = value;
              if (passed && !solved) {
                solved = true;
                solved_state = child.state;
              }
            }
            tree.push_back(std::move(child));
            tree[cur].children.push_back(tree.size() - 1);
          }
          if (!tree[cur].children.empty()) {
            cur = tree[cur].children.front();
            path.push_back(cur);
          }
        }
        if (solved) {
          reward = Score::kPass;
        } else if (tree[cur].terminal) {
          reward = tree[cur].terminal_value.value_or(Score::kNone);
        } else {
          const std::size_t remaining = budget.max_actions - tree[cur].actions;
          Sample s = sample_program(tree[cur].state, generator, verifier, problem, sp,
                                    std::numeric_limits<std::size_t>::max(),
                                    std::min(params.rollout_action_cap, remaining), rng, meter);
          exhausted_generator = s.generator_exhausted;
          if (s.state.size() > tree[cur].state.size() || s.ended) {
            const auto [value, passed] = judge(s.state, s.ended);
            reward = value;
            if (passed) {
              solved = true;
              solved_state = s.state;
            }
          }
        }
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const GeneratorError& e) {
      if (e.kind() == GeneratorError::Kind::kExhausted) exhausted_generator = true;
      reward = Score::kNone;
    } catch (const std::exception&) {
      reward = Score::kNone;
    }

    const double v = to_int(reward);
    for (std::size_t id : path) {
      tree[id].visits += 1;
      tree[id].value_sum += v;
    }
    run.backed_up.push_back(to_int(reward));
    const std::size_t spent = meter.spent() - before;
    log.events.push_back(RunEvent{++iteration, spent, to_int(reward), std::nullopt});

    if (solved) {
      log.outcome.status = RunStatus::kSuccess;
      log.outcome.program = program_of(solved_state, problem, verifier);
      break;
    }
    if (exhausted_generator) {
      log.outcome.reason = "generator exhausted";
      break;
    }
    stalled = spent == 0 ? stalled + 1 : 0;
    if (stalled >= kStallLimit) {
      log.outcome.reason = "stalled";
      break;
    }
  }
  finish(log, meter);
  return run;
}

std::string build_reflexion_context(const State& prompt,
                                    const std::vector<ReflexionRound>& rounds,
                                    const ReflexionParams& params) {
  std::deque<std::string> blocks;
  for (const auto& r : rounds) {
    std::string b;
    b += "\nPrevious attempt:\n";
    b += r.program;
    if (!b.empty() && b.back() != '\n') b += '\n';
    b += "\nVerifier output:\n";
    b += r.diagnostic;
    if (!b.empty() && b.back() != '\n') b += '\n';
    b += '\n';
    b += params.instruction;
    b += "\n\n";
    blocks.push_back(std::move(b));
  }
  std::size_t total = prompt.text().size();
  for (const auto& b : blocks) total += b.size();
  while (!blocks.empty() && total > params.max_context_chars) {
    total -= blocks.front().size();
    blocks.pop_front();
  }
  std::string out = prompt.text();
  for (const auto& b : blocks) out += b;
  return out;
}

RunLog run_reflexion(const ProblemSpec& problem, Generator& generator,
                     const Verifier& verifier, const ReflexionParams& params,
                     const Budget& budget, std::uint64_t seed,
                     const SamplingParams& sampling) {
  budget.validate();
  if (params.max_context_chars == 0) throw ConfigError("max_context_chars must be positive");
  if (params.max_rounds == 0) throw ConfigError("max_rounds must be positive");
  SamplingParams sp = sampling;
  sp.temperature = params.temperature;
  sp.validate();

  nlohmann::json config = budget_json(budget, sp);
  config["reflexion"] = to_json(params);
  RunLog log = start_log(problem, Method::kReflexion, seed, std::move(config));
  TokenMeter meter(budget.max_tokens, budget.wall_clock_limit);
  std::mt19937_64 rng(seed);
  const State prompt = render_prompt(problem);
  std::vector<ReflexionRound> rounds;

  std::size_t stalled = 0;
  for (std::size_t round = 1;; ++round) {
    if (meter.exhausted()) {
      log.outcome.reason = meter.reason();
      break;
    }
    if (round > params.max_rounds) {
      log.outcome.reason = "max rounds";
      break;
    }
    const State context = State::from_prompt(build_reflexion_context(prompt, rounds, params));
    const std::size_t before = meter.spent();
    Sample s;
    SuccessCheck ok;
    try {
      s = sample_program(context, generator, verifier, problem, sp, budget.max_tokens,
                         budget.max_actions, rng, meter);
      ok = check_success(s.state, problem, verifier);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      ok = SuccessCheck{false, e.what()};
    }
    const std::size_t spent = meter.spent() - before;
    log.events.push_back(RunEvent{round, spent, ok.passed ? 1 : -1, std::nullopt});
    if (ok.passed) {
      log.outcome.status = RunStatus::kSuccess;
      log.outcome.program = program_of(s.state, problem, verifier);
      break;
    }
    if (s.generator_exhausted) {
      log.outcome.reason = "generator exhausted";
      break;
    }
    rounds.push_back(ReflexionRound{program_of(s.state, problem, verifier), ok.detail});
    stalled = spent == 0 ? stalled + 1 : 0;
    if (stalled >= kStallLimit) {
      log.outcome.reason = "stalled";
      break;
    }
  }
  finish(log, meter);
  return log;
}

}  // namespace vermcts
