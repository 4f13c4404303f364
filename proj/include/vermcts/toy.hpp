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

// A tiny verified language used for hermetic testing of the search:
//
//   program := stmt* "qed;"
//   stmt    := "def" IDENT "=" expr ";"
//            | "assert" expr ("==" | "<" | ">") expr ";"
//   expr    := INT | IDENT | expr "+" expr      (left-associative)
//
// "//" starts a comment that runs to the end of the line. Tokens may be split
// across generator chunks; a token at the very end of the text that could
// still grow (a word, "=", "/") is never reported as an error.

#ifndef VERMCTS_TOY_HPP_
#define VERMCTS_TOY_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vermcts::toy {

/// An operand: a decimal literal (kept as digits until evaluation) or a name.
struct Literal {
  std::string digits;
};
struct Name {
  std::string id;
};
using Atom = std::variant<Literal, Name>;

/// Left-associative sum of atoms.
struct Expr {
  std::vector<Atom> terms;
};

enum class Compare { kEq, kLt, kGt };

struct Statement {
  enum class Kind { kDef, kAssert, kQed };
  Kind kind = Kind::kQed;
  std::string name;  // def only
  Expr lhs;          // def value, or assert left side
  Compare op = Compare::kEq;
  Expr rhs;
  std::size_t begin = 0;  // byte offsets into the parsed text
  std::size_t end = 0;    // one past the terminating ';'
  std::size_t line = 1;
};

struct ParseError {
  std::size_t position = 0;
  std::size_t line = 1;
  std::string message;
};

struct ParseResult {
  std::vector<Statement> statements;
  /// Unterminated text after the last complete statement (empty when none).
  std::string trailing;
  std::size_t trailing_begin = 0;
  std::optional<ParseError> error;

  bool has_qed() const noexcept {
    return !statements.empty() && statements.back().kind == Statement::Kind::kQed;
  }
};

ParseResult parse(std::string_view text);

enum class FailureKind { kNone, kUndefinedVariable, kAssertion, kOverflow };

struct EvalOutcome {
  FailureKind failure = FailureKind::kNone;
  std::string reason;
  std::size_t statement_index = 0;

  bool ok() const noexcept { return failure == FailureKind::kNone; }
};

/// Runs the statements in order with checked 64-bit arithmetic.
EvalOutcome eval(std::span<const Statement> statements);

std::string describe(const EvalOutcome& outcome, std::span<const Statement> statements);

}  // namespace vermcts::toy

#endif  // VERMCTS_TOY_HPP_
