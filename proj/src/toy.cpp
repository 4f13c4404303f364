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

#include "vermcts/toy.hpp"

#include <cctype>
#include <charconv>
#include <map>

namespace vermcts::toy {
namespace {

enum class Tok { kIdent, kInt, kDef, kAssert, kQed, kAssign, kEq, kLt, kGt, kPlus, kSemi, kInvalid };

struct Token {
  Tok kind;
  std::size_t begin;
  std::size_t end;
  std::string_view text;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    const std::size_t begin = i;
    Tok kind = Tok::kInvalid;
    if (ident_start(c)) {
      while (i < n && ident_char(text[i])) ++i;
      std::string_view word = text.substr(begin, i - begin);
      kind = word == "def" ? Tok::kDef
           : word == "assert" ? Tok::kAssert
           : word == "qed" ? Tok::kQed
           : Tok::kIdent;
    } else if (digit(c)) {
      while (i < n && digit(text[i])) ++i;
      kind = Tok::kInt;
    } else {
      ++i;
      switch (c) {
        case '=':
          if (i < n && text[i] == '=') {
            ++i;
            kind = Tok::kEq;
          } else {
            kind = Tok::kAssign;
          }
          break;
        case '<': kind = Tok::kLt; break;
        case '>': kind = Tok::kGt; break;
        case '+': kind = Tok::kPlus; break;
        case ';': kind = Tok::kSemi; break;
        default: kind = Tok::kInvalid;
      }
    }
    out.push_back({kind, begin, i, text.substr(begin, i - begin)});
  }
  return out;
}

// A token at the very end of the text that more characters could still turn
// into something else.
bool provisional(const Token& t, std::size_t text_size) {
  if (t.end != text_size) return false;
  switch (t.kind) {
    case Tok::kIdent:
    case Tok::kDef:
    case Tok::kAssert:
    case Tok::kQed:
    case Tok::kAssign:
      return true;
    case Tok::kInvalid:
      return t.text == "/";
    default:
      return false;
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text), tokens_(lex(text)) {
    for (std::size_t i = 0; i < text.size(); ++i)
      if (text[i] == '\n') newlines_.push_back(i);
  }

  ParseResult run() {
    ParseResult result;
    bool after_qed = false;
    while (pos_ < tokens_.size()) {
      const std::size_t start = pos_;
      if (after_qed) {
        fail(result, tokens_[pos_], "unexpected text after qed;");
        set_trailing(result, start);
        return result;
      }
      Statement stmt;
      Status status = statement(stmt);
      if (status == Status::kOk) {
        stmt.begin = tokens_[start].begin;
        stmt.end = tokens_[pos_ - 1].end;
        stmt.line = line_of(stmt.begin);
        after_qed = stmt.kind == Statement::Kind::kQed;
        result.statements.push_back(std::move(stmt));
        continue;
      }
      set_trailing(result, start);
      if (status == Status::kError) result.error = error_;
      return result;
    }
    result.trailing_begin = text_.size();
    return result;
  }

 private:
  enum class Status { kOk, kIncomplete, kError };

  std::size_t line_of(std::size_t offset) const {
    std::size_t line = 1;
    for (std::size_t nl : newlines_) {
      if (nl >= offset) break;
      ++line;
    }
    return line;
  }

  void set_trailing(ParseResult& result, std::size_t start_token) {
    result.trailing_begin = tokens_[start_token].begin;
    result.trailing = std::string(text_.substr(result.trailing_begin));
  }

  void fail(ParseResult& result, const Token& t, std::string message) {
    result.error = ParseError{t.begin, line_of(t.begin), std::move(message)};
  }

  // Consumes a token of kind \p want; otherwise classifies the mismatch.
  Status expect(Tok want, const char* what, const Token** out = nullptr) {
    if (pos_ == tokens_.size()) return Status::kIncomplete;
    const Token& t = tokens_[pos_];
    if (t.kind != want) return mismatch(t, what);
    ++pos_;
    if (out) *out = &t;
    return Status::kOk;
  }

  Status mismatch(const Token& t, const char* what) {
    if (provisional(t, text_.size())) return Status::kIncomplete;
    error_ = ParseError{t.begin, line_of(t.begin),
                        std::string("expected ") + what + " but found '" + std::string(t.text) + "'"};
    return Status::kError;
  }

  Status atom(Expr& expr) {
    if (pos_ == tokens_.size()) return Status::kIncomplete;
    const Token& t = tokens_[pos_];
    if (t.kind == Tok::kInt) {
      expr.terms.emplace_back(Literal{std::string(t.text)});
    } else if (t.kind == Tok::kIdent) {
      expr.terms.emplace_back(Name{std::string(t.text)});
    } else {
      return mismatch(t, "an integer or identifier");
    }
    ++pos_;
    return Status::kOk;
  }

  Status expr(Expr& out) {
    if (Status s = atom(out); s != Status::kOk) return s;
    while (pos_ < tokens_.size() && tokens_[pos_].kind == Tok::kPlus) {
      ++pos_;
      if (Status s = atom(out); s != Status::kOk) return s;
    }
    return Status::kOk;
  }

  Status statement(Statement& stmt) {
    const Token& head = tokens_[pos_];
    switch (head.kind) {
      case Tok::kDef: {
        ++pos_;
        stmt.kind = Statement::Kind::kDef;
        const Token* name = nullptr;
        if (Status s = expect(Tok::kIdent, "an identifier", &name); s != Status::kOk) return s;
        stmt.name = std::string(name->text);
        if (Status s = expect(Tok::kAssign, "'='"); s != Status::kOk) return s;
        if (Status s = expr(stmt.lhs); s != Status::kOk) return s;
        return expect(Tok::kSemi, "';'");
      }
      case Tok::kAssert: {
        ++pos_;
        stmt.kind = Statement::Kind::kAssert;
        if (Status s = expr(stmt.lhs); s != Status::kOk) return s;
        if (pos_ == tokens_.size()) return Status::kIncomplete;
        switch (tokens_[pos_].kind) {
          case Tok::kEq: stmt.op = Compare::kEq; break;
          case Tok::kLt: stmt.op = Compare::kLt; break;
          case Tok::kGt: stmt.op = Compare::kGt; break;
          default: return mismatch(tokens_[pos_], "'==', '<' or '>'");
        }
        ++pos_;
        if (Status s = expr(stmt.rhs); s != Status::kOk) return s;
        return expect(Tok::kSemi, "';'");
      }
      case Tok::kQed:
        ++pos_;
        stmt.kind = Statement::Kind::kQed;
        return expect(Tok::kSemi, "';'");
      default:
        return mismatch(head, "'def', 'assert' or 'qed'");
    }
  }

  std::string_view text_;
  std::vector<Token> tokens_;
  std::vector<std::size_t> newlines_;
  std::size_t pos_ = 0;
  ParseError error_;
};

std::string render(const Expr& e) {
  std::string out;
  for (std::size_t i = 0; i < e.terms.size(); ++i) {
    if (i) out += " + ";
    if (const auto* lit = std::get_if<Literal>(&e.terms[i]))
      out += lit->digits;
    else
      out += std::get<Name>(e.terms[i]).id;
  }
  return out;
}

const char* render(Compare op) {
  switch (op) {
    case Compare::kEq: return "==";
    case Compare::kLt: return "<";
    case Compare::kGt: return ">";
  }
  return "==";
}

struct Value {
  FailureKind failure = FailureKind::kNone;
  std::int64_t v = 0;
  std::string what;
};

Value evaluate(const Expr& e, const std::map<std::string, std::int64_t, std::less<>>& env) {
  Value out;
  for (const Atom& a : e.terms) {
    std::int64_t term = 0;
    if (const auto* lit = std::get_if<Literal>(&a)) {
      auto [ptr, ec] = std::from_chars(lit->digits.data(), lit->digits.data() + lit->digits.size(), term);
      if (ec != std::errc()) return {FailureKind::kOverflow, 0, "literal " + lit->digits + " out of range"};
    } else {
      const auto& name = std::get<Name>(a).id;
      auto it = env.find(name);
      if (it == env.end()) return {FailureKind::kUndefinedVariable, 0, "undefined variable '" + name + "'"};
      term = it->second;
    }
    if (__builtin_add_overflow(out.v, term, &out.v))
      return {FailureKind::kOverflow, 0, "integer overflow in " + render(e)};
  }
  return out;
}

}  // namespace

ParseResult parse(std::string_view text) { return Parser(text).run(); }

EvalOutcome eval(std::span<const Statement> statements) {
  std::map<std::string, std::int64_t, std::less<>> env;
  for (std::size_t i = 0; i < statements.size(); ++i) {
    const Statement& s = statements[i];
    const std::string where = "line " + std::to_string(s.line) + ": ";
    if (s.kind == Statement::Kind::kQed) continue;
    Value lhs = evaluate(s.lhs, env);
    if (lhs.failure != FailureKind::kNone) return {lhs.failure, where + lhs.what, i};
    if (s.kind == Statement::Kind::kDef) {
      env[s.name] = lhs.v;
      continue;
    }
    Value rhs = evaluate(s.rhs, env);
    if (rhs.failure != FailureKind::kNone) return {rhs.failure, where + rhs.what, i};
    bool holds = s.op == Compare::kEq ? lhs.v == rhs.v
               : s.op == Compare::kLt ? lhs.v < rhs.v
                                      : lhs.v > rhs.v;
    if (!holds) {
      return {FailureKind::kAssertion,
              where + "assertion failed: " + render(s.lhs) + " " + render(s.op) + " " +
                  render(s.rhs) + " (" + std::to_string(lhs.v) + " vs " + std::to_string(rhs.v) + ")",
              i};
    }
  }
  return {};
}

std::string describe(const EvalOutcome& outcome, std::span<const Statement> statements) {
  if (outcome.ok()) return "ok: " + std::to_string(statements.size()) + " statements";
  return outcome.reason;
}

}  // namespace vermcts::toy
