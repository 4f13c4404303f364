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

// Comparison methods. All of them account tokens exactly like run_vermcts:
// the sum of generator-reported chunk tokens, discarded samples included.

#ifndef VERMCTS_BASELINES_HPP_
#define VERMCTS_BASELINES_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "vermcts/generator.hpp"
#include "vermcts/mdp.hpp"
#include "vermcts/problem.hpp"
#include "vermcts/run_log.hpp"
#include "vermcts/verifier.hpp"

namespace vermcts {

struct WholeParams {
  double temperature = 0.6;
  /// Tokens one sample may use; unset means the run's max_tokens.
  std::optional<std::size_t> per_sample_token_cap;
};

struct RolloutParams {
  std::size_t children_per_expand = 3;
  std::size_t rollout_action_cap = 50;
  double c_uct = 1.0;
  double temperature = 0.8;
};

inline constexpr std::string_view kDefaultReflectionInstruction =
    "The program above failed verification with the errors shown. Reflect on "
    "what went wrong and write a corrected program from the beginning.";

struct ReflexionParams {
  double temperature = 0.4;
  std::size_t max_context_chars = 12000;
  std::size_t max_rounds = 1000;
  std::string instruction = std::string(kDefaultReflectionInstruction);
};

nlohmann::json to_json(const WholeParams& params);
nlohmann::json to_json(const RolloutParams& params);
nlohmann::json to_json(const ReflexionParams& params);

/// Samples one whole program: chunks from \p prefix until the program ends
/// (sentinel or language terminator), the token cap, the horizon, or the
/// budget. Tokens are added to \p meter.
struct Sample {
  State state;
  std::size_t tokens = 0;
  bool ended = false;
  bool generator_exhausted = false;
};

Sample sample_program(const State& prefix, Generator& generator, const Verifier& verifier,
                      const ProblemSpec& problem, const SamplingParams& sampling,
                      std::size_t token_cap, std::size_t max_actions,
                      std::mt19937_64& rng, TokenMeter& meter);

RunLog run_whole_sampling(const ProblemSpec& problem, Generator& generator,
                          const Verifier& verifier, const Budget& budget,
                          const WholeParams& params, std::uint64_t seed,
                          const SamplingParams& sampling = {});

/// Node of the rollout tree. Children are fixed at expansion time.
struct RolloutNode {
  State state;
  std::uint64_t visits = 0;
  double value_sum = 0.0;
  std::vector<std::size_t> children;
  std::size_t parent = static_cast<std::size_t>(-1);
  std::size_t actions = 0;
  bool terminal = false;
  std::optional<Score> terminal_value;
};

struct RolloutRun {
  RunLog log;
  std::vector<RolloutNode> tree;
  /// Rewards backed up per iteration, in order.
  std::vector<int> backed_up;
};

RolloutRun run_rollout_mcts(const ProblemSpec& problem, Generator& generator,
                            const Verifier& verifier, const RolloutParams& params,
                            const Budget& budget, std::uint64_t seed,
                            const SamplingParams& sampling = {});

/// Prompt context for the next Reflexion round: the prompt followed by the
/// most recent rounds that fit in max_context_chars.
struct ReflexionRound {
  std::string program;
  std::string diagnostic;
};

std::string build_reflexion_context(const State& prompt,
                                    const std::vector<ReflexionRound>& rounds,
                                    const ReflexionParams& params);

RunLog run_reflexion(const ProblemSpec& problem, Generator& generator,
                     const Verifier& verifier, const ReflexionParams& params,
                     const Budget& budget, std::uint64_t seed,
                     const SamplingParams& sampling = {});

}  // namespace vermcts

#endif  // VERMCTS_BASELINES_HPP_
