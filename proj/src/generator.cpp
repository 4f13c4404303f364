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

#include "vermcts/generator.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>

#include "vermcts/errors.hpp"
#include "vermcts/text.hpp"

namespace vermcts {

StopKind default_stop_kind(Language language) {
  return language == Language::kCoq ? StopKind::kDot : StopKind::kNewline;
}

void SamplingParams::validate() const {
  if (temperature < 0.0) throw ConfigError("sampling: temperature must be non-negative");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("sampling: top_p must be in (0, 1]");
  if (max_action_tokens < 1) throw ConfigError("sampling: max_action_tokens must be >= 1");
}

TruncatedChunk apply_stop(std::string_view raw, const SamplingParams& params) {
  std::size_t cut = raw.size();
  if (params.stop == StopKind::kNewline) {
    if (auto pos = raw.find('\n'); pos != std::string_view::npos) cut = pos + 1;
  } else {
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '.') continue;
      if (i + 1 == raw.size()) {
        cut = i + 1;
        break;
      }
      if (std::isspace(static_cast<unsigned char>(raw[i + 1]))) {
        cut = i + 2;
        break;
      }
    }
  }
  if (!params.sentinel.empty()) {
    if (auto pos = raw.find(params.sentinel); pos != std::string_view::npos)
      cut = std::min(cut, pos + params.sentinel.size());
  }
  TruncatedChunk out;
  std::string_view text = raw.substr(0, cut);
  if (whitespace_token_count(text) > params.max_action_tokens) {
    text = text.substr(0, prefix_with_tokens(text, params.max_action_tokens));
    out.hit_token_cap = true;
  }
  out.text = std::string(text);
  return out;
}

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kHttpLlm: return "http-llm";
    case GeneratorKind::kScripted: return "scripted";
    case GeneratorKind::kGrammar: return "grammar";
  }
  return "grammar";
}

GeneratorKind parse_generator_kind(std::string_view name) {
  if (name == "http-llm" || name == "http") return GeneratorKind::kHttpLlm;
  if (name == "scripted") return GeneratorKind::kScripted;
  if (name == "grammar") return GeneratorKind::kGrammar;
  throw ConfigError("unknown generator kind '" + std::string(name) + "'");
}

void GeneratorSpec::validate() const {
  switch (kind) {
    case GeneratorKind::kHttpLlm:
      if (!endpoint || endpoint->base_url.empty())
        throw ConfigError("http-llm generator requires an endpoint");
      break;
    case GeneratorKind::kScripted:
      if (!script) throw ConfigError("scripted generator requires a script");
      break;
    case GeneratorKind::kGrammar:
      if (grammar_depth_cap < 1) throw ConfigError("grammar depth cap must be >= 1");
      if (grammar.identifiers.empty()) throw ConfigError("grammar needs identifiers");
      break;
  }
}

std::size_t count_tokens(std::string_view text, const GeneratorSpec& /*spec*/) {
  return whitespace_token_count(text);
}

ScriptedGenerator::ScriptedGenerator(std::vector<std::string> script)
    : script_(std::move(script)) {}

Action ScriptedGenerator::next_chunk(const State& /*prefix*/, const SamplingParams& params) {
  if (cursor_ >= script_.size())
    throw GeneratorError(GeneratorError::Kind::kExhausted, "scripted generator exhausted");
  TruncatedChunk chunk = apply_stop(script_[cursor_++], params);
  Action action;
  action.token_count = whitespace_token_count(chunk.text);
  action.text = std::move(chunk.text);
  return action;
}

std::vector<std::string> load_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read script file " + path.string());
  std::vector<std::string> chunks;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    chunks.push_back(unescape_record(line));
  }
  return chunks;
}

void save_script(const std::filesystem::path& path, const std::vector<std::string>& chunks) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write script file " + path.string());
  for (const auto& chunk : chunks) out << escape_record(chunk) << '\n';
}

namespace {

std::string sample_atom(std::mt19937_64& rng, const GrammarWeights& w) {
  if (uniform_unit(rng) < w.ident) return w.identifiers[uniform_index(rng, w.identifiers.size())];
  return std::to_string(uniform_index(rng, static_cast<std::size_t>(w.max_literal) + 1));
}

std::string sample_expr(std::mt19937_64& rng, const GrammarWeights& w, int depth_cap) {
  std::string expr = sample_atom(rng, w);
  for (int depth = 1; depth < depth_cap && uniform_unit(rng) < w.plus; ++depth)
    expr += " + " + sample_atom(rng, w);
  return expr;
}

}  // namespace

std::string sample_grammar_statement(std::mt19937_64& rng, const GrammarWeights& w,
                                     int depth_cap) {
  const double total = w.def + w.assert_ + w.qed;
  const double u = uniform_unit(rng) * total;
  if (u < w.def) {
    std::string name = w.identifiers[uniform_index(rng, w.identifiers.size())];
    return "def " + name + " = " + sample_expr(rng, w, depth_cap) + ";\n";
  }
  if (u < w.def + w.assert_) {
    static constexpr const char* kOps[] = {"==", "<", ">"};
    std::string lhs = sample_expr(rng, w, depth_cap);
    const char* op = kOps[uniform_index(rng, 3)];
    return "assert " + lhs + " " + op + " " + sample_expr(rng, w, depth_cap) + ";\n";
  }
  return "qed;\n";
}

GrammarGenerator::GrammarGenerator(std::uint64_t grammar_seed, GrammarWeights weights,
                                   int depth_cap)
    : grammar_seed_(grammar_seed), weights_(std::move(weights)), depth_cap_(depth_cap) {
  if (depth_cap_ < 1) throw ConfigError("grammar depth cap must be >= 1");
}

Action GrammarGenerator::next_chunk(const State& prefix, const SamplingParams& params) {
  std::mt19937_64 rng(mix_seed(mix_seed(grammar_seed_, params.seed), fnv1a(prefix.text())));
  TruncatedChunk chunk = apply_stop(sample_grammar_statement(rng, weights_, depth_cap_), params);
  Action action;
  action.token_count = whitespace_token_count(chunk.text);
  action.text = std::move(chunk.text);
  return action;
}

std::string sample_grammar_program(std::uint64_t seed, int depth_cap,
                                   const GrammarWeights& weights) {
  constexpr int kMaxStatements = 64;
  std::mt19937_64 rng(mix_seed(seed, 0));
  std::string program;
  for (int i = 0; i < kMaxStatements; ++i) {
    std::string stmt = sample_grammar_statement(rng, weights, depth_cap);
    program += stmt;
    if (stmt == "qed;\n") break;
  }
  return program;
}

std::unique_ptr<Generator> make_generator(const GeneratorSpec& given, std::uint64_t run_seed) {
  GeneratorSpec spec = given;
  if (spec.kind == GeneratorKind::kHttpLlm)
    spec.endpoint = endpoint_from_env(spec.endpoint.value_or(HttpEndpoint{}));
  spec.validate();
  switch (spec.kind) {
    case GeneratorKind::kHttpLlm:
      return std::make_unique<HttpGenerator>(*spec.endpoint);
    case GeneratorKind::kScripted:
      return std::make_unique<ScriptedGenerator>(*spec.script);
    case GeneratorKind::kGrammar:
      return std::make_unique<GrammarGenerator>(spec.grammar_seed.value_or(run_seed),
                                                spec.grammar, spec.grammar_depth_cap);
  }
  throw ConfigError("unknown generator kind");
}

}  // namespace vermcts
