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

#include "vermcts/mdp.hpp"

#include <stdexcept>
#include <utility>

#include "vermcts/errors.hpp"

namespace vermcts {

std::string_view to_string(Language language) {
  switch (language) {
    case Language::kDafny: return "dafny";
    case Language::kCoq: return "coq";
    case Language::kToy: return "toy";
  }
  return "toy";
}

Language parse_language(std::string_view name) {
  if (name == "dafny") return Language::kDafny;
  if (name == "coq") return Language::kCoq;
  if (name == "toy") return Language::kToy;
  throw ConfigError("unknown language '" + std::string(name) + "'");
}

State::State() : text_(std::make_shared<const std::string>()) {}

State::State(std::string text, std::size_t prompt_size)
    : text_(std::make_shared<const std::string>(std::move(text))),
      prompt_size_(prompt_size) {}

State State::from_prompt(std::string prompt) {
  const std::size_t n = prompt.size();
  return State(std::move(prompt), n);
}

State State::from_program(std::string program) { return State(std::move(program), 0); }

State State::with_program(std::string_view prompt, std::string_view program) {
  std::string text;
  text.reserve(prompt.size() + program.size());
  text.append(prompt).append(program);
  return State(std::move(text), prompt.size());
}

void Budget::validate() const {
  // max_tokens == 0 is a legal, immediately exhausted budget.
  if (max_actions == 0) throw ConfigError("budget: max_actions must be positive");
  if (wall_clock_limit && wall_clock_limit->count() <= 0)
    throw ConfigError("budget: wall_clock_limit must be positive");
}

State transition(const State& state, const Action& action) {
  if (action.text.empty()) return state;
  return State::with_program(state.prompt(), std::string(state.program()) + action.text);
}

Score terminal_reward(const State& /*state*/, bool complete, Score verifier_verdict) {
  if (!complete) return Score::kNone;
  return verifier_verdict == Score::kPass ? Score::kPass : Score::kFail;
}

}  // namespace vermcts
