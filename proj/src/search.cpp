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

#include "vermcts/search.hpp"

#include <algorithm>
#include <cmath>

#include "vermcts/errors.hpp"

namespace vermcts {

SearchTree::SearchTree(State root_state, double p_widen, std::size_t root_units)
    : p_widen_(p_widen) {
  Node root;
  root.state = std::move(root_state);
  root.units = root_units;
  nodes_.push_back(std::move(root));
  add_widen(0);
}

NodeId SearchTree::add_widen(NodeId parent) {
  const NodeId id = nodes_.size();
  Node w;
  w.state = nodes_[parent].state;
  w.kind = NodeKind::kWiden;
  w.prior = p_widen_;
  w.parent = parent;
  w.creation_index = id;
  w.depth = nodes_[parent].depth;
  w.actions = nodes_[parent].actions;
  w.units = nodes_[parent].units;
  nodes_.push_back(std::move(w));
  nodes_[parent].children.push_back(id);
  return id;
}

NodeId SearchTree::add_regular(NodeId parent, State state, std::size_t added_actions,
                               std::size_t units) {
  if (parent >= nodes_.size() || nodes_[parent].is_widen())
    throw std::logic_error("add_regular: parent must be a regular node");
  const NodeId id = nodes_.size();
  Node n;
  n.state = std::move(state);
  n.parent = parent;
  n.creation_index = id;
  n.depth = nodes_[parent].depth + 1;
  n.actions = nodes_[parent].actions + added_actions;
  n.units = units;
  nodes_.push_back(std::move(n));
  nodes_[parent].children.push_back(id);

  ++stats_.nodes;
  stats_.depth = std::max(stats_.depth, nodes_[id].depth);
  // Every regular node has exactly one widen child.
  stats_.width = std::max(stats_.width, nodes_[parent].children.size() - 1);
  add_widen(id);
  return id;
}

void SearchParams::validate() const {
  if (!(c_uct > 0.0)) throw ConfigError("c_uct must be positive");
  if (!(p_widen > 0.0 && p_widen < 1.0)) throw ConfigError("p_widen must be in (0, 1)");
  if (expansion_depth_limit == 0) throw ConfigError("expansion_depth_limit must be positive");
  budget.validate();
  sampling.validate();
}

nlohmann::json to_json(const SearchParams& params) {
  nlohmann::json j{
      {"c_uct", params.c_uct},
      {"p_widen", params.p_widen},
      {"expansion_depth_limit", params.expansion_depth_limit},
      {"max_tokens", params.budget.max_tokens},
      {"max_actions", params.budget.max_actions},
      {"seed", params.seed},
      {"temperature", params.sampling.temperature},
      {"top_p", params.sampling.top_p},
      {"max_action_tokens", params.sampling.max_action_tokens},
  };
  if (params.budget.wall_clock_limit)
    j["wall_clock_ms"] = params.budget.wall_clock_limit->count();
  return j;
}

double score(const Node& node, std::uint64_t parent_visits, const SearchParams& params) {
  if (node.visits == 0) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(node.visits);
  const double parent = static_cast<double>(std::max<std::uint64_t>(parent_visits, 1));
  return node.prior * params.c_uct * std::sqrt(std::log(parent) / n) + node.value_sum / n;
}

std::vector<NodeId> select(const SearchTree& tree, const SearchParams& params) {
  std::vector<NodeId> path{tree.root()};
  NodeId cur = tree.root();
  while (!tree.node(cur).children.empty()) {
    const Node& n = tree.node(cur);
    NodeId best = kNoNode;
    double best_score = -std::numeric_limits<double>::infinity();
    for (NodeId c : n.children) {
      const double s = score(tree.node(c), n.visits, params);
      if (best == kNoNode || s > best_score ||
          (s == best_score && tree.node(c).creation_index < tree.node(best).creation_index)) {
        best = c;
        best_score = s;
      }
    }
    path.push_back(best);
    cur = best;
  }
  return path;
}

EvalResult evaluate_and_maybe_expand(const SearchTree& tree, NodeId parent,
                                     SearchContext& context) {
  const Node& p = tree.node(parent);
  if (p.is_widen()) throw std::logic_error("evaluate_and_maybe_expand: parent is a widen node");
  const State base = p.state;
  const std::size_t base_units = p.units;
  const std::size_t base_actions = p.actions;
  const std::string_view sentinel = effective_sentinel(context.problem, context.verifier);
  const bool base_has_sentinel =
      !sentinel.empty() && base.program().find(sentinel) != std::string_view::npos;

  EvalResult r;
  r.candidate = base;
  r.value = Score::kFail;
  const std::size_t limit = context.params.expansion_depth_limit;
  const std::size_t horizon = context.params.budget.max_actions;

  for (std::size_t step = 0; step < limit; ++step) {
    if (context.meter != nullptr && context.meter->exhausted()) {
      r.budget_hit = true;
      r.detail = context.meter->reason();
      return r;
    }
    if (base_actions + step >= horizon) {
      r.detail = "horizon reached";
      r.truncated = true;
      return r;
    }
    SamplingParams sp = context.params.sampling;
    sp.seed = context.rng();
    Action a;
    try {
      a = context.generator.next_chunk(r.candidate, sp);
    } catch (const GeneratorError& e) {
      if (e.kind() != GeneratorError::Kind::kExhausted) throw;
      r.generator_exhausted = true;
      r.detail = e.what();
      return r;
    }
    r.tokens_spent += a.token_count;
    if (context.meter != nullptr) context.meter->add(a.token_count);
    ++r.actions;
    r.candidate = transition(r.candidate, a);

    const Verdict v = context.verifier.check_partial(r.candidate);
    if (v.score == Score::kFail) {
      r.detail = v.detail;
      return r;
    }
    const bool sentinel_now = !base_has_sentinel && !sentinel.empty() &&
                              r.candidate.program().find(sentinel) != std::string_view::npos;
    if (sentinel_now && v.score == Score::kNone) {
      r.detail = "program ended inside an unfinished unit";
      return r;
    }
    if (v.score == Score::kPass && (v.units > base_units || sentinel_now)) {
      r.value = Score::kPass;
      r.child_units = v.units;
      Completion c = detect_completion(r.candidate, context.problem, context.verifier);
      if (c.complete) {
        r.complete_program = r.candidate;
        r.success = std::move(c.success);
      } else {
        r.child = r.candidate;
      }
      return r;
    }
  }
  r.detail = "expansion depth limit reached";
  r.truncated = true;
  return r;
}

void backpropagate(SearchTree& tree, std::span<const NodeId> path, Score value) {
  const double v = to_int(value);
  for (NodeId id : path) {
    Node& n = tree.node(id);
    n.visits += 1;
    n.value_sum += v;
  }
}

TreeStats tree_stats(const SearchTree& tree) {
  TreeStats s{0, 0, 0};
  std::vector<NodeId> stack{tree.root()};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const Node& n = tree.node(id);
    if (n.is_widen()) continue;
    ++s.nodes;
    s.depth = std::max(s.depth, n.depth);
    std::size_t regular = 0;
    for (NodeId c : n.children) {
      if (!tree.node(c).is_widen()) ++regular;
      stack.push_back(c);
    }
    s.width = std::max(s.width, regular);
  }
  return s;
}

SearchRun run_vermcts(const ProblemSpec& problem, Generator& generator,
                      const Verifier& verifier, const SearchParams& params,
                      const RunOptions& options) {
  params.validate();
  SearchRun run{RunLog{}, SearchTree(render_prompt(problem), params.p_widen, 0)};
  RunLog& log = run.log;
  SearchTree& tree = run.tree;
  log.problem_id = problem.id;
  log.method = std::string(to_string(Method::kVerMcts));
  log.seed = params.seed;
  log.config = to_json(params);
  log.started_at = utc_timestamp_now();

  TokenMeter meter(params.budget.max_tokens, params.budget.wall_clock_limit);
  std::mt19937_64 rng(params.seed);
  SearchContext context{generator, verifier, problem, params, rng, &meter};

  std::size_t iteration = 0;
  std::size_t stalled = 0;
  while (true) {
    if (meter.exhausted()) {
      log.outcome.reason = meter.reason();
      break;
    }
    const std::vector<NodeId> path = select(tree, params);
    const NodeId parent = tree.node(path.back()).parent;
    const std::size_t before = meter.spent();

    EvalResult r;
    try {
      r = evaluate_and_maybe_expand(tree, parent, context);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      r = EvalResult{};
      r.value = Score::kFail;
      r.detail = e.what();
    }
    const std::size_t spent = meter.spent() - before;
    ++iteration;

    std::optional<NodeId> new_child;
    bool solved = false;
    if (r.complete_program) {
      SuccessCheck s = r.success ? *r.success : check_success(*r.complete_program, problem, verifier);
      if (s.passed) {
        solved = true;
        log.outcome.status = RunStatus::kSuccess;
        log.outcome.program = program_of(*r.complete_program, problem, verifier);
      } else {
        new_child = tree.add_regular(parent, *r.complete_program, r.actions, r.child_units);
      }
    } else if (r.child) {
      new_child = tree.add_regular(parent, *r.child, r.actions, r.child_units);
    }
    backpropagate(tree, path, r.value);

    log.events.push_back(RunEvent{iteration, spent, to_int(r.value), tree.stats()});
    if (options.on_iteration)
      options.on_iteration(IterationView{iteration, tree, path, r, new_child, meter.spent()});

    if (solved) break;
    if (r.generator_exhausted) {
      log.outcome.reason = "generator exhausted";
      break;
    }
    stalled = spent == 0 ? stalled + 1 : 0;
    if (stalled >= options.stall_limit) {
      log.outcome.reason = "stalled";
      break;
    }
  }
  log.outcome.total_tokens = meter.spent();
  log.elapsed_seconds = meter.elapsed_seconds();
  return run;
}

}  // namespace vermcts
