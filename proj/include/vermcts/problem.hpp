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

#ifndef VERMCTS_PROBLEM_HPP_
#define VERMCTS_PROBLEM_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vermcts/mdp.hpp"

namespace vermcts {

struct ProblemSpec {
  std::string id;
  Language language = Language::kToy;
  std::string prompt;
  std::vector<std::string> hints;
  /// Appended to the candidate only when checking success; never rendered.
  std::string check_lemma;
  /// Replaces check_lemma when non-empty.
  std::string check_lemma_override;
  std::string proof_marker;
  std::size_t min_lines = 0;
  std::optional<std::string> completion_sentinel;

  const std::string& effective_check_lemma() const noexcept {
    return check_lemma_override.empty() ? check_lemma : check_lemma_override;
  }

  void validate(std::string_view origin) const;
};

/// Parses one problem file. The format is a header of "key: value" lines
/// followed by verbatim blocks opened by "=== <name>" lines:
///
///   id: dafny_factorial
///   language: dafny
///   proof_marker: FacPositive
///   min_lines: 6
///   === prompt
///   In Dafny, write a factorial function ...
///   === check_lemma
///   lemma CHECK_FacPositive(n: nat) ensures fac(n) > 0 { FacPositive(n); }
///
/// Blocks: prompt, hints (one hint per non-blank line), check_lemma,
/// check_lemma_override. Header keys: id, language, proof_marker,
/// min_lines, completion_sentinel. Lines starting with '#' in the header are
/// comments.
ProblemSpec parse_problem(std::string_view content, std::string_view origin);
ProblemSpec load_problem(const std::filesystem::path& path);

/// Loads every problem under \p path. A "suite.txt" index (one relative path
/// per line) fixes the order; without one, *.problem files are taken in
/// lexicographic path order.
std::vector<ProblemSpec> load_suite(const std::filesystem::path& path);

/// Default bundled suite directory (overridable with VERMCTS_SUITE).
std::filesystem::path default_suite_path();

const ProblemSpec& find_problem(const std::vector<ProblemSpec>& suite, std::string_view id);

/// The initial search state: the prompt, plus the hints for Coq problems.
State render_prompt(const ProblemSpec& problem);

}  // namespace vermcts

#endif  // VERMCTS_PROBLEM_HPP_
