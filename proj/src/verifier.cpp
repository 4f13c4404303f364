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

#include "vermcts/verifier.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vermcts/errors.hpp"
#include "vermcts/process.hpp"
#include "vermcts/text.hpp"
#include "vermcts/toy.hpp"

namespace vermcts {

namespace {

constexpr std::size_t kMaxDetail = 4000;

std::string clip(std::string text) {
  if (text.size() > kMaxDetail) {
    text.resize(kMaxDetail);
    text += "\n[...]";
  }
  return text;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) out.push_back(word);
  return out;
}

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '?';
}

constexpr std::array<std::string_view, 14> kBodyKeywords = {
    "function", "predicate", "lemma",     "method",   "class",  "trait",    "module",
    "iterator", "ghost",     "static",    "constructor", "twostate", "least", "greatest"};

constexpr std::array<std::string_view, 20> kClauseKeywords = {
    "requires", "ensures", "reads", "modifies", "decreases", "returns", "then",
    "else",     "if",      "match", "case",     "var",       "by",      "calc",
    "forall",   "exists",  "in",    "invariant", "yields",   "witness"};

bool contains(auto& list, std::string_view word) {
  return std::find(list.begin(), list.end(), word) != list.end();
}

bool ends_with_continuation(std::string_view line) {
  line = trim(line);
  if (line.empty()) return false;
  const char last = line.back();
  if (std::string_view("=,(|:+-*&!<[/").find(last) != std::string_view::npos) return true;
  std::size_t i = line.size();
  while (i > 0 && word_char(line[i - 1])) --i;
  const std::string_view word = line.substr(i);
  return !word.empty() && contains(kClauseKeywords, word);
}

}  // namespace

UnitGranularity default_granularity(Language language) {
  switch (language) {
    case Language::kDafny: return UnitGranularity::kFunctionBlock;
    case Language::kCoq: return UnitGranularity::kCommandDot;
    case Language::kToy: return UnitGranularity::kStatementSemicolon;
  }
  return UnitGranularity::kStatementSemicolon;
}

VerifierSpec VerifierSpec::toy() {
  VerifierSpec s;
  s.kind = Language::kToy;
  s.unit_granularity = UnitGranularity::kStatementSemicolon;
  return s;
}

VerifierSpec VerifierSpec::dafny(std::filesystem::path binary) {
  VerifierSpec s;
  s.kind = Language::kDafny;
  s.binary_path = std::move(binary);
  s.unit_granularity = UnitGranularity::kFunctionBlock;
  s.args = {"verify"};
  return s;
}

VerifierSpec VerifierSpec::coq(std::filesystem::path binary) {
  VerifierSpec s;
  s.kind = Language::kCoq;
  s.binary_path = std::move(binary);
  s.unit_granularity = UnitGranularity::kCommandDot;
  s.args = {"-q"};
  return s;
}

void VerifierSpec::validate() const {
  if (timeout.count() <= 0) throw ConfigError("verifier timeout must be positive");
  if (kind != Language::kToy && (!binary_path || binary_path->empty()))
    throw ConfigError("verifier for " + std::string(to_string(kind)) + " needs a binary path");
}

VerifierSpec verifier_spec_from_env(Language language,
                                    std::optional<std::filesystem::path> binary) {
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
  VerifierSpec spec;
  switch (language) {
    case Language::kToy:
      spec = VerifierSpec::toy();
      break;
    case Language::kDafny:
      spec = VerifierSpec::dafny(binary ? *binary
                                        : std::filesystem::path(env("VERMCTS_DAFNY").value_or("dafny")));
      if (auto args = env("VERMCTS_DAFNY_ARGS")) spec.args = split_words(*args);
      break;
    case Language::kCoq:
      spec = VerifierSpec::coq(binary ? *binary
                                      : std::filesystem::path(env("VERMCTS_COQC").value_or("coqc")));
      break;
  }
  if (auto t = env("VERMCTS_VERIFIER_TIMEOUT_S")) {
    char* end = nullptr;
    const double seconds = std::strtod(t->c_str(), &end);
    if (end == t->c_str() || *end != '\0' || !(seconds > 0))
      throw ConfigError("VERMCTS_VERIFIER_TIMEOUT_S must be a positive number, got '" + *t + "'");
    spec.timeout = std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
  }
  return spec;
}

std::string_view strip_sentinel(std::string_view program, std::string_view sentinel) {
  if (sentinel.empty()) return program;
  const auto at = program.find(sentinel);
  return at == std::string_view::npos ? program : program.substr(0, at);
}

UnitScan scan_dafny_units(std::string_view program) {
  UnitScan out;
  int braces = 0;
  int parens = 0;
  int block_comment = 0;
  bool in_string = false;
  bool content = false;       // code since the last boundary
  bool needs_body = false;    // a function-like declaration has no body yet
  bool line_start_word = true;
  std::string line_code;

  auto end_line = [&](std::size_t next) {
    const bool closed = braces <= 0 && parens <= 0 && block_comment == 0 && !in_string;
    if (closed && content && !needs_body && !is_blank(line_code) &&
        !ends_with_continuation(line_code)) {
      ++out.units;
      out.boundary = next;
      content = false;
    }
    line_code.clear();
    line_start_word = true;
  };

  const std::size_t n = program.size();
  std::size_t i = 0;
  while (i < n) {
    const char c = program[i];
    if (block_comment > 0) {
      if (c == '*' && i + 1 < n && program[i + 1] == '/') {
        --block_comment;
        i += 2;
        continue;
      }
      if (c == '/' && i + 1 < n && program[i + 1] == '*') {
        ++block_comment;
        i += 2;
        continue;
      }
      if (c == '\n') end_line(i + 1);
      ++i;
      continue;
    }
    if (in_string) {
      line_code += 'x';
      if (c == '\\' && i + 1 < n) {
        i += 2;
        continue;
      }
      if (c == '"') in_string = false;
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && program[i + 1] == '/') {
      while (i < n && program[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && program[i + 1] == '*') {
      ++block_comment;
      i += 2;
      continue;
    }
    if (c == '\n') {
      end_line(i + 1);
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      line_code += c;
      ++i;
      continue;
    }
    content = true;
    if (c == '"') {
      in_string = true;
      line_code += 'x';
      line_start_word = false;
      ++i;
      continue;
    }
    if (word_char(c)) {
      std::size_t j = i;
      while (j < n && word_char(program[j])) ++j;
      const std::string_view word = program.substr(i, j - i);
      if (line_start_word && braces == 0 && parens == 0) {
        if (contains(kBodyKeywords, word)) {
          needs_body = true;
        } else if (word == "datatype" || word == "codatatype" || word == "type" ||
                   word == "newtype" || word == "const" || word == "import" ||
                   word == "include" || word == "opaque") {
          needs_body = false;
        }
      }
      line_start_word = false;
      line_code.append(word);
      i = j;
      continue;
    }
    line_start_word = false;
    switch (c) {
      case '{':
        if (braces == 0 && parens == 0) needs_body = false;
        ++braces;
        break;
      case '}': --braces; break;
      case '(':
      case '[': ++parens; break;
      case ')':
      case ']': --parens; break;
      default: break;
    }
    line_code += c;
    ++i;
  }
  if (content) end_line(n);
  out.trailing_fragment = content;
  return out;
}

UnitScan scan_coq_units(std::string_view program) {
  UnitScan out;
  int comment = 0;
  bool in_string = false;
  bool content = false;
  const std::size_t n = program.size();
  for (std::size_t i = 0; i < n; ++i) {
    const char c = program[i];
    if (comment > 0) {
      if (c == '(' && i + 1 < n && program[i + 1] == '*') {
        ++comment;
        ++i;
      } else if (c == '*' && i + 1 < n && program[i + 1] == ')') {
        --comment;
        ++i;
      }
      continue;
    }
    if (in_string) {
      if (c == '"') {
        if (i + 1 < n && program[i + 1] == '"') {
          ++i;
        } else {
          in_string = false;
        }
      }
      continue;
    }
    if (c == '(' && i + 1 < n && program[i + 1] == '*') {
      ++comment;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    content = true;
    if (c == '"') {
      in_string = true;
      continue;
    }
    if (c == '.') {
      const bool prev_dot = i > 0 && program[i - 1] == '.';
      const bool next_ok = i + 1 == n || std::isspace(static_cast<unsigned char>(program[i + 1]));
      if (next_ok && !prev_dot) {
        ++out.units;
        out.boundary = i + 1;
        content = false;
      }
    }
  }
  out.trailing_fragment = content;
  return out;
}

std::string Verifier::inject_check(std::string_view program,
                                   std::string_view check_lemma) const {
  std::string out(program);
  if (!out.empty() && out.back() != '\n') out += '\n';
  out += '\n';
  out.append(check_lemma);
  if (out.back() != '\n') out += '\n';
  return out;
}

bool Verifier::ends_program(std::string_view) const { return false; }

Verdict ToyVerifier::check_partial(const State& text) const {
  const std::string_view program = strip_sentinel(text.program(), spec_.sentinel);
  const toy::ParseResult parsed = toy::parse(program);
  Verdict v;
  v.units = parsed.statements.size();
  const toy::EvalOutcome run = toy::eval(parsed.statements);
  if (!run.ok()) {
    v.score = Score::kFail;
    v.detail = toy::describe(run, parsed.statements);
    return v;
  }
  if (parsed.error) {
    v.score = Score::kFail;
    v.detail = "line " + std::to_string(parsed.error->line) + ": " + parsed.error->message;
    return v;
  }
  v.score = (!parsed.trailing.empty() || v.units == 0) ? Score::kNone : Score::kPass;
  return v;
}

FullCheck ToyVerifier::verify_program(std::string_view program) const {
  const toy::ParseResult parsed = toy::parse(program);
  const toy::EvalOutcome run = toy::eval(parsed.statements);
  if (!run.ok()) return {false, toy::describe(run, parsed.statements)};
  if (parsed.error)
    return {false, "line " + std::to_string(parsed.error->line) + ": " + parsed.error->message};
  if (!parsed.trailing.empty()) return {false, "unterminated statement at end of program"};
  if (!parsed.has_qed()) return {false, "program does not end with qed;"};
  return {true, ""};
}

std::string ToyVerifier::inject_check(std::string_view program,
                                      std::string_view check_lemma) const {
  const toy::ParseResult parsed = toy::parse(program);
  std::string lemma(check_lemma);
  if (lemma.empty() || lemma.back() != '\n') lemma += '\n';
  if (parsed.has_qed()) {
    const std::size_t at = parsed.statements.back().begin;
    std::string out(program.substr(0, at));
    if (!out.empty() && out.back() != '\n') out += '\n';
    out += lemma;
    out.append(program.substr(at));
    return out;
  }
  return Verifier::inject_check(program, check_lemma);
}

bool ToyVerifier::ends_program(std::string_view program) const {
  return toy::parse(program).has_qed();
}

ExternalVerifier::ExternalVerifier(VerifierSpec spec) : Verifier(std::move(spec)) {
  spec_.validate();
  auto resolved = find_executable(spec_.binary_path->string());
  if (!resolved)
    throw VerifierMissing(std::string(to_string(spec_.kind)) + " verifier not found: '" +
                          spec_.binary_path->string() + "'");
  binary_ = *resolved;
}

bool ExternalVerifier::only_open_proofs(std::string_view) const { return false; }

FullCheck ExternalVerifier::run(std::string_view source, bool allow_open_proofs) const {
  TempDir dir;
  const std::filesystem::path file = dir.path() / ("program" + std::string(file_extension()));
  {
    std::ofstream out(file, std::ios::binary);
    out.write(source.data(), static_cast<std::streamsize>(source.size()));
    if (!out) throw std::runtime_error("cannot write " + file.string());
  }
  std::vector<std::string> argv{binary_.string()};
  argv.insert(argv.end(), spec_.args.begin(), spec_.args.end());
  argv.push_back(file.string());
  ProcessResult r = run_process(argv, spec_.timeout);
  if (r.timed_out) return {false, "timeout"};
  if (r.exit_code == 0) return {true, clip(std::move(r.output))};
  if (allow_open_proofs && only_open_proofs(r.output)) return {true, clip(std::move(r.output))};
  std::string detail = std::move(r.output);
  if (is_blank(detail)) detail = "verifier exited with status " + std::to_string(r.exit_code);
  return {false, clip(std::move(detail))};
}

Verdict ExternalVerifier::check_partial(const State& text) const {
  const std::string_view program = strip_sentinel(text.program(), spec_.sentinel);
  const UnitScan units = scan(program);
  Verdict v;
  v.units = units.units;
  if (units.units == 0) return v;
  FullCheck r = run(program.substr(0, units.boundary), true);
  if (!r.accepted) {
    v.score = Score::kFail;
    v.detail = std::move(r.detail);
    return v;
  }
  v.score = units.trailing_fragment ? Score::kNone : Score::kPass;
  return v;
}

FullCheck ExternalVerifier::verify_program(std::string_view program) const {
  const UnitScan units = scan(program);
  if (units.trailing_fragment) return {false, "unterminated declaration at end of program"};
  return run(program, false);
}

UnitScan DafnyVerifier::scan(std::string_view program) const { return scan_dafny_units(program); }

UnitScan CoqVerifier::scan(std::string_view program) const { return scan_coq_units(program); }

bool CoqVerifier::only_open_proofs(std::string_view output) const {
  std::size_t errors = 0;
  for (std::size_t at = output.find("Error"); at != std::string_view::npos;
       at = output.find("Error", at + 1))
    ++errors;
  const bool pending = output.find("pending proof") != std::string_view::npos ||
                       output.find("incomplete proof") != std::string_view::npos;
  return pending && errors <= 1;
}

std::unique_ptr<Verifier> make_verifier(const VerifierSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case Language::kToy: return std::make_unique<ToyVerifier>(spec);
    case Language::kDafny: return std::make_unique<DafnyVerifier>(spec);
    case Language::kCoq: return std::make_unique<CoqVerifier>(spec);
  }
  throw ConfigError("unknown verifier kind");
}

std::string_view effective_sentinel(const ProblemSpec& problem, const Verifier& verifier) {
  if (problem.completion_sentinel) return *problem.completion_sentinel;
  return verifier.spec().sentinel;
}

std::string program_of(const State& text, const ProblemSpec& problem,
                       const Verifier& verifier) {
  return std::string(strip_sentinel(text.program(), effective_sentinel(problem, verifier)));
}

SuccessCheck check_success(const State& program, const ProblemSpec& problem,
                           const Verifier& verifier) {
  const std::string code = program_of(program, problem, verifier);
  if (!problem.proof_marker.empty() && code.find(problem.proof_marker) == std::string::npos)
    return {false, "the program does not contain '" + problem.proof_marker + "'"};
  const std::size_t lines = count_nonblank_lines(code);
  if (lines < problem.min_lines)
    return {false, "the program has " + std::to_string(lines) +
                       " non-blank lines; at least " + std::to_string(problem.min_lines) +
                       " are expected"};
  const FullCheck checked =
      verifier.verify_program(verifier.inject_check(code, problem.effective_check_lemma()));
  if (checked.accepted) return {true, ""};
  const FullCheck plain = verifier.verify_program(code);
  if (!plain.accepted) return {false, plain.detail};
  return {false, "the program verifies but does not establish the required property"};
}

Completion detect_completion(const State& text, const ProblemSpec& problem,
                             const Verifier& verifier) {
  const std::string_view sentinel = effective_sentinel(problem, verifier);
  if (!sentinel.empty() && text.program().find(sentinel) != std::string_view::npos)
    return {true, std::nullopt};
  if (verifier.ends_program(program_of(text, problem, verifier))) return {true, std::nullopt};
  SuccessCheck s = check_success(text, problem, verifier);
  const bool passed = s.passed;
  return {passed, std::move(s)};
}

bool is_complete(const State& text, const ProblemSpec& problem, const Verifier& verifier) {
  return detect_completion(text, problem, verifier).complete;
}

}  // namespace vermcts
