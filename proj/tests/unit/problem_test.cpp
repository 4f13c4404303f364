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

#include "vermcts/problem.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vermcts/errors.hpp"

namespace vermcts {
namespace {

const char* const kSample =
    "# a comment\n"
    "id: sample\n"
    "language: coq\n"
    "proof_marker: Qed.\n"
    "min_lines: 4\n"
    "=== prompt\n"
    "Prove it.\n"
    "Second line.\n"
    "\n"
    "=== hints\n"
    "### Hint: one\n"
    "\n"
    "### Hint: two\n"
    "=== check_lemma\n"
    "Lemma CHECK: True. Proof. exact I. Qed.\n";

TEST(ParseProblem, AllFields) {
  const ProblemSpec p = parse_problem(kSample, "sample.problem");
  EXPECT_EQ(p.id, "sample");
  EXPECT_EQ(p.language, Language::kCoq);
  EXPECT_EQ(p.proof_marker, "Qed.");
  EXPECT_EQ(p.min_lines, 4u);
  EXPECT_EQ(p.prompt, "Prove it.\nSecond line.\n");
  EXPECT_EQ(p.hints, (std::vector<std::string>{"### Hint: one", "### Hint: two"}));
  EXPECT_EQ(p.check_lemma, "Lemma CHECK: True. Proof. exact I. Qed.\n");
  EXPECT_FALSE(p.completion_sentinel);
  EXPECT_EQ(p.effective_check_lemma(), p.check_lemma);
}

TEST(ParseProblem, OverrideAndSentinel) {
  const ProblemSpec p = parse_problem(
      "id: x\nlanguage: toy\ncompletion_sentinel: END\n=== prompt\nP\n=== check_lemma\nassert 1 == 2;\n"
      "=== check_lemma_override\nassert 1 == 1;\n",
      "x");
  EXPECT_EQ(p.effective_check_lemma(), "assert 1 == 1;\n");
  EXPECT_EQ(p.completion_sentinel, "END");
}

TEST(ParseProblem, Errors) {
  const std::string tail = "=== prompt\nP\n=== check_lemma\nL\n";
  auto fails_with = [&](const std::string& text, const std::string& needle) {
    try {
      parse_problem(text, "f.problem");
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ProblemFormatError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  fails_with("language: toy\n" + tail, "invalid or missing id");
  fails_with("id: x\n" + tail, "missing language");
  fails_with("id: x\nlanguage: lean\n" + tail, "f.problem:2: unknown language 'lean'");
  fails_with("id: x\nlanguage: toy\ncolour: red\n" + tail, "f.problem:3: unknown key 'colour'");
  fails_with("id: x\nlanguage: toy\nmin_lines: -2\n" + tail, "min_lines");
  fails_with("id: x\nlanguage: toy\njust words\n" + tail, "expected 'key: value'");
  fails_with("id: x\nlanguage: toy\n=== prompt\nP\n", "no check_lemma");
  fails_with("id: x\nlanguage: toy\n=== check_lemma\nL\n", "empty prompt");
  fails_with("id: x\nlanguage: toy\n" + tail + "=== prompt\nQ\n", "duplicate block 'prompt'");
  fails_with("id: x\nlanguage: toy\n=== notes\n" + tail, "unknown block 'notes'");
  fails_with("id: bad id\nlanguage: toy\n" + tail, "invalid or missing id");
}

TEST(LoadSuite, BundledSuiteInIndexOrder) {
  const auto& suite = testing::bundled_suite();
  ASSERT_EQ(suite.size(), 20u);
  std::size_t dafny = 0, coq = 0, toy = 0;
  for (const auto& p : suite) {
    dafny += p.language == Language::kDafny;
    coq += p.language == Language::kCoq;
    toy += p.language == Language::kToy;
    EXPECT_FALSE(p.effective_check_lemma().empty()) << p.id;
    EXPECT_FALSE(p.proof_marker.empty()) << p.id;
  }
  EXPECT_EQ(dafny, 9u);
  EXPECT_EQ(coq, 6u);
  EXPECT_EQ(toy, 5u);
  EXPECT_EQ(suite.front().id, "dafny_factorial");
  EXPECT_EQ(suite.back().id, "toy_unsat");
}

TEST(LoadSuite, CheckLemmasAreNamedAfterTheProofMarker) {
  for (const auto& p : testing::bundled_suite()) {
    if (p.language != Language::kDafny) continue;
    EXPECT_NE(p.check_lemma.find("CHECK_"), std::string::npos) << p.id;
    EXPECT_NE(p.check_lemma.find(p.proof_marker), std::string::npos) << p.id;
  }
  for (const auto& p : testing::bundled_suite())
    if (p.language == Language::kCoq) EXPECT_EQ(p.proof_marker, "Qed.") << p.id;
}

TEST(LoadSuite, DirectoryWithoutIndexAndSingleFile) {
  TempDir dir;
  testing::write_file(dir.path() / "b/two.problem",
                      "id: two\nlanguage: toy\n=== prompt\nP\n=== check_lemma\nL\n");
  testing::write_file(dir.path() / "a.problem",
                      "id: one\nlanguage: toy\n=== prompt\nP\n=== check_lemma\nL\n");
  testing::write_file(dir.path() / "notes.txt", "ignored");
  const auto suite = load_suite(dir.path());
  ASSERT_EQ(suite.size(), 2u);
  EXPECT_EQ(suite[0].id, "one");
  EXPECT_EQ(suite[1].id, "two");
  EXPECT_EQ(load_suite(dir.path() / "a.problem").size(), 1u);
  EXPECT_THROW(load_suite(dir.path() / "missing"), ConfigError);
}

TEST(LoadSuite, DuplicateIdsAndBadIndex) {
  TempDir dir;
  const std::string body = "id: same\nlanguage: toy\n=== prompt\nP\n=== check_lemma\nL\n";
  testing::write_file(dir.path() / "a.problem", body);
  testing::write_file(dir.path() / "b.problem", body);
  EXPECT_THROW(load_suite(dir.path()), ProblemFormatError);
  testing::write_file(dir.path() / "suite.txt", "# order\na.problem\nmissing.problem\n");
  EXPECT_THROW(load_suite(dir.path()), ProblemFormatError);
}

TEST(FindProblem, UnknownIdIsAConfigError) {
  EXPECT_EQ(find_problem(testing::bundled_suite(), "toy_constant").id, "toy_constant");
  EXPECT_THROW(find_problem(testing::bundled_suite(), "nope"), ConfigError);
}

TEST(RenderPrompt, CoqIncludesHints) {
  const ProblemSpec& p = testing::bundled("coq_factorial");
  const State s = render_prompt(p);
  EXPECT_EQ(s.program(), "");
  EXPECT_EQ(s.prompt().substr(0, p.prompt.size()), p.prompt);
  for (const auto& h : p.hints) EXPECT_NE(s.text().find(h), std::string::npos);
  EXPECT_EQ(s.text().find("CHECK_"), std::string::npos);
}

TEST(RenderPrompt, DafnyPromptIsVerbatim) {
  for (const char* id : {"dafny_factorial", "dafny_food", "dafny_reverse"}) {
    const ProblemSpec& p = testing::bundled(id);
    EXPECT_EQ(render_prompt(p).text(), p.prompt) << id;
  }
  EXPECT_FALSE(testing::bundled("dafny_food").hints.empty());
}

TEST(RenderPrompt, NeverContainsTheCheckLemma) {
  for (const auto& p : testing::bundled_suite()) {
    const std::string first_line = p.check_lemma.substr(0, p.check_lemma.find('\n'));
    EXPECT_EQ(render_prompt(p).text().find(first_line), std::string::npos) << p.id;
  }
}

}  // namespace
}  // namespace vermcts
