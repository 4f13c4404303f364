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

#ifndef VERMCTS_GENERATOR_HPP_
#define VERMCTS_GENERATOR_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "vermcts/mdp.hpp"

namespace vermcts {

/// Where an action ends. Dafny and toy actions are lines, Coq actions are
/// commands ending with a dot followed by whitespace.
enum class StopKind { kNewline, kDot };

StopKind default_stop_kind(Language language);

inline constexpr std::string_view kDefaultSentinel = "```";

struct SamplingParams {
  double temperature = 1.0;
  double top_p = 0.95;
  std::size_t max_action_tokens = 64;
  StopKind stop = StopKind::kNewline;
  /// End-of-program marker. Empty disables it.
  std::string sentinel = std::string(kDefaultSentinel);
  std::uint64_t seed = 0;

  void validate() const;
};

struct TruncatedChunk {
  std::string text;
  bool hit_token_cap = false;
};

/// Post-hoc action boundary: cut at the earliest stop condition, then cap at
/// max_action_tokens whitespace tokens.
TruncatedChunk apply_stop(std::string_view raw, const SamplingParams& params);

enum class GeneratorKind { kHttpLlm, kScripted, kGrammar };

std::string_view to_string(GeneratorKind kind);
GeneratorKind parse_generator_kind(std::string_view name);

/// Connection settings for a completion-style endpoint.
struct HttpEndpoint {
  std::string base_url;
  std::string path = "/v1/completions";
  std::string api_key;
  std::string model;
  std::string text_pointer = "/choices/0/text";
  std::string usage_pointer = "/usage/completion_tokens";
  /// Sent in the request's stop list. Truncation is always applied locally;
  /// server-side stops strip the stop string, so this is off by default.
  bool server_side_stop = false;
  std::chrono::milliseconds request_timeout{120000};
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
};

/// Relative weights of the toy grammar sampler.
struct GrammarWeights {
  double def = 0.55;
  double assert_ = 0.35;
  double qed = 0.10;
  /// Probability that an expression is extended with another "+ atom".
  double plus = 0.3;
  /// Probability that an atom is an identifier rather than a literal.
  double ident = 0.5;
  std::vector<std::string> identifiers = {"a", "b", "c", "d", "e"};
  int max_literal = 9;
};

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kGrammar;
  std::optional<HttpEndpoint> endpoint;
  std::optional<std::vector<std::string>> script;
  std::optional<std::uint64_t> grammar_seed;
  GrammarWeights grammar;
  int grammar_depth_cap = 3;

  void validate() const;
};

class Generator {
 public:
  virtual ~Generator() = default;

  /// Produces the next action for \p prefix. Throws GeneratorError.
  virtual Action next_chunk(const State& prefix, const SamplingParams& params) = 0;
  virtual GeneratorKind kind() const noexcept = 0;
};

/// Whitespace-token count for scripted and grammar generators. HTTP
/// generators report usage on each Action; for them this is only an estimate.
std::size_t count_tokens(std::string_view text, const GeneratorSpec& spec);

/// Replays a fixed chunk list, one chunk per call. Not shareable across runs.
class ScriptedGenerator final : public Generator {
 public:
  explicit ScriptedGenerator(std::vector<std::string> script);

  Action next_chunk(const State& prefix, const SamplingParams& params) override;
  GeneratorKind kind() const noexcept override { return GeneratorKind::kScripted; }

  std::size_t cursor() const noexcept { return cursor_; }
  std::size_t remaining() const noexcept { return script_.size() - cursor_; }

 private:
  std::vector<std::string> script_;
  std::size_t cursor_ = 0;
};

std::vector<std::string> load_script(const std::filesystem::path& path);
void save_script(const std::filesystem::path& path, const std::vector<std::string>& chunks);

/// Samples single toy-language statements. Pure in (prefix, params.seed,
/// grammar seed), so callers vary params.seed between calls.
class GrammarGenerator final : public Generator {
 public:
  GrammarGenerator(std::uint64_t grammar_seed, GrammarWeights weights = {},
                   int depth_cap = 3);

  Action next_chunk(const State& prefix, const SamplingParams& params) override;
  GeneratorKind kind() const noexcept override { return GeneratorKind::kGrammar; }

  const GrammarWeights& weights() const noexcept { return weights_; }

 private:
  std::uint64_t grammar_seed_;
  GrammarWeights weights_;
  int depth_cap_;
};

/// One newline-terminated toy statement drawn from the grammar.
std::string sample_grammar_statement(std::mt19937_64& rng,
                                     const GrammarWeights& weights, int depth_cap);

/// A full statement stream ending with "qed;" (or cut after a fixed number of
/// statements). Deterministic per seed.
std::string sample_grammar_program(std::uint64_t seed, int depth_cap,
                                   const GrammarWeights& weights = {});

class HttpGenerator final : public Generator {
 public:
  explicit HttpGenerator(HttpEndpoint endpoint);

  Action next_chunk(const State& prefix, const SamplingParams& params) override;
  GeneratorKind kind() const noexcept override { return GeneratorKind::kHttpLlm; }

  /// Request body for \p prefix; exposed for tests.
  std::string request_body(const State& prefix, const SamplingParams& params) const;

 private:
  HttpEndpoint endpoint_;
};

/// Fills endpoint URL and bearer token from VERMCTS_ENDPOINT and
/// VERMCTS_API_KEY when the fields are empty.
HttpEndpoint endpoint_from_env(HttpEndpoint endpoint);

/// Fresh generator instance for one run. \p run_seed seeds grammar
/// generators that have no explicit grammar_seed.
std::unique_ptr<Generator> make_generator(const GeneratorSpec& spec,
                                          std::uint64_t run_seed);

}  // namespace vermcts

#endif  // VERMCTS_GENERATOR_HPP_
