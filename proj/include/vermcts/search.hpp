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

// Verifier-guided Monte Carlo tree search over partial programs.
//
// Every regular node carries one "widen" child. Selection always ends at a
// widen node; expanding it means sampling a new sibling for it, so nodes can
// grow arbitrarily wide. The verifier scores each expansion as soon as it
// completes a unit: failures are never stored and back up -1, passes become
// new nodes and back up +1, an optimistic bound on the child's value.

#ifndef VERMCTS_SEARCH_HPP_
#define VERMCTS_SEARCH_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vermcts/generator.hpp"
#include "vermcts/mdp.hpp"
#include "vermcts/problem.hpp"
#include "vermcts/run_log.hpp"
#include "vermcts/verifier.hpp"

namespace vermcts {

enum class NodeKind { kRegular, kWiden };

using NodeId = std::size_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct Node {
  State state;
  NodeKind kind = NodeKind::kRegular;
  double prior = 1.0;
  std::uint64_t visits = 0;
  double value_sum = 0.0;
  std::vector<NodeId> children;
  NodeId parent = kNoNode;
  std::uint64_t creation_index = 0;
  std::size_t depth = 1;     // regular nodes from the root, inclusive
  std::size_t actions = 0;   // actions composing the state's program
  std::size_t units = 0;     // complete units in the state's program

  bool is_widen() const noexcept { return kind == NodeKind::kWiden; }
};

/// Arena-backed tree; node ids are creation indices.
class SearchTree {
 public:
  SearchTree(State root_state, double p_widen, std::size_t root_units = 0);

  NodeId root() const noexcept { return 0; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  Node& node(NodeId id) { return nodes_.at(id); }
  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  /// Adds a regular child of \p parent together with its widen child.
  NodeId add_regular(NodeId parent, State state, std::size_t added_actions,
                     std::size_t units);

  /// Maintained incrementally; tree_stats() recomputes it from scratch.
  const TreeStats& stats() const noexcept { return stats_; }

 private:
  NodeId add_widen(NodeId parent);

  std::vector<Node> nodes_;
  double p_widen_;
  TreeStats stats_;
};

struct SearchParams {
  double c_uct = 3.0;
  double p_widen = 0.1;
  std::size_t expansion_depth_limit = 8;
  Budget budget;
  std::uint64_t seed = 0;
  SamplingParams sampling;  // temperature 1.0, top_p 0.95 by default

  void validate() const;
};

nlohmann::json to_json(const SearchParams& params);

struct EvalResult {
  Score value = Score::kFail;
  std::optional<State> child;
  std::optional<State> complete_program;
  /// The parent state extended with everything sampled, stored or not.
  State candidate;
  std::size_t tokens_spent = 0;
  std::size_t actions = 0;
  std::size_t child_units = 0;
  std::string detail;
  /// Set when the success check already ran while detecting completion.
  std::optional<SuccessCheck> success;
  bool generator_exhausted = false;
  bool budget_hit = false;
  /// Stopped by the horizon or the depth limit before any verdict.
  bool truncated = false;
};

/// Everything one evaluation needs. The rng supplies per-call sampling seeds.
struct SearchContext {
  Generator& generator;
  const Verifier& verifier;
  const ProblemSpec& problem;
  const SearchParams& params;
  std::mt19937_64& rng;
  TokenMeter* meter = nullptr;
};

/// prior * c_uct * sqrt(ln(parent_visits) / visits) + value_sum / visits,
/// or +infinity for an unvisited node.
double score(const Node& node, std::uint64_t parent_visits, const SearchParams& params);

/// Root-to-leaf path following the best-scoring child, ties to the lowest
/// creation index.
std::vector<NodeId> select(const SearchTree& tree, const SearchParams& params);

/// Extends \p parent with generator chunks until the verifier returns a
/// verdict on a new unit or the depth limit is reached.
EvalResult evaluate_and_maybe_expand(const SearchTree& tree, NodeId parent,
                                     SearchContext& context);

/// Adds one visit and \p value to every node on \p path.
void backpropagate(SearchTree& tree, std::span<const NodeId> path, Score value);

TreeStats tree_stats(const SearchTree& tree);

struct IterationView {
  std::size_t iteration;
  const SearchTree& tree;
  const std::vector<NodeId>& path;
  const EvalResult& eval;
  std::optional<NodeId> new_child;
  std::size_t total_tokens;
};

struct RunOptions {
  std::function<void(const IterationView&)> on_iteration;
  /// Iterations without any token spent before the run is declared stalled.
  std::size_t stall_limit = 1000;
};

struct SearchRun {
  RunLog log;
  SearchTree tree;
};

SearchRun run_vermcts(const ProblemSpec& problem, Generator& generator,
                      const Verifier& verifier, const SearchParams& params,
                      const RunOptions& options = {});

}  // namespace vermcts

#endif  // VERMCTS_SEARCH_HPP_
