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

#ifndef VERMCTS_MDP_HPP_
#define VERMCTS_MDP_HPP_

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace vermcts {

enum class Language { kDafny, kCoq, kToy };

std::string_view to_string(Language language);
Language parse_language(std::string_view name);

/// Verifier verdict / reward in {-1, 0, +1}.
enum class Score : int { kFail = -1, kNone = 0, kPass = 1 };

constexpr int to_int(Score s) noexcept { return static_cast<int>(s); }

/// Prompt plus partial program. Immutable; copies share the underlying text.
class State {
 public:
  State();

  /// A state holding only the prompt (the root of a search).
  static State from_prompt(std::string prompt);
  /// A state with an empty prompt, i.e. the whole text is program.
  static State from_program(std::string program);
  static State with_program(std::string_view prompt, std::string_view program);

  const std::string& text() const noexcept { return *text_; }
  std::string_view prompt() const noexcept {
    return std::string_view(*text_).substr(0, prompt_size_);
  }
  std::string_view program() const noexcept {
    return std::string_view(*text_).substr(prompt_size_);
  }
  std::size_t prompt_size() const noexcept { return prompt_size_; }
  std::size_t size() const noexcept { return text_->size(); }

  friend bool operator==(const State& a, const State& b) {
    return a.prompt_size_ == b.prompt_size_ && *a.text_ == *b.text_;
  }

 private:
  State(std::string text, std::size_t prompt_size);

  std::shared_ptr<const std::string> text_;
  std::size_t prompt_size_ = 0;
};

struct Action {
  std::string text;
  std::size_t token_count = 0;
};

/// Run limits. max_actions is the horizon: the most actions one program
/// (one root-to-leaf trajectory) may be built from.
struct Budget {
  std::size_t max_tokens = 5000;
  std::size_t max_actions = 200;
  std::optional<std::chrono::milliseconds> wall_clock_limit;

  void validate() const;
};

/// s' = s + a. The prompt boundary is preserved.
State transition(const State& state, const Action& action);

/// +1 / -1 for complete accepted / rejected programs, 0 otherwise.
Score terminal_reward(const State& state, bool complete, Score verifier_verdict);

}  // namespace vermcts

#endif  // VERMCTS_MDP_HPP_
