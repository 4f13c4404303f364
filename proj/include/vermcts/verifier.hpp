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

#ifndef VERMCTS_VERIFIER_HPP_
#define VERMCTS_VERIFIER_HPP_

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vermcts/mdp.hpp"
#include "vermcts/problem.hpp"

namespace vermcts {

enum class UnitGranularity { kFunctionBlock, kCommandDot, kStatementSemicolon };

UnitGranularity default_granularity(Language language);

struct VerifierSpec {
  Language kind = Language::kToy;
  std::optional<std::filesystem::path> binary_path;
  std::chrono::milliseconds timeout{60000};
  UnitGranularity unit_granularity = UnitGranularity::kStatementSemicolon;
  /// Arguments placed between the binary and the source file.
  std::vector<std::string> args;
  /// Text from the first sentinel on is not part of the program.
  std::string sentinel = "```";

  static VerifierSpec toy();
  static VerifierSpec dafny(std::filesystem::path binary);
  static VerifierSpec coq(std::filesystem::path binary);

  void validate() const;
};

/// Applies VERMCTS_DAFNY / VERMCTS_COQC and VERMCTS_VERIFIER_TIMEOUT_S.
VerifierSpec verifier_spec_from_env(Language language,
                                    std::optional<std::filesystem::path> binary = {});

struct Verdict {
  Score score = Score::kNone;
  std::string detail;
  /// Complete verifiable units found in the program part of the text.
  std::size_t units = 0;
};

/// Outcome of verifying a finished program (no trailing fragment allowed).
struct FullCheck {
  bool accepted = false;
  std::string detail;
};

/// Where the complete units of a partial program end.
struct UnitScan {
  std::size_t units = 0;
  /// Offset just past the last complete unit.
  std::size_t boundary = 0;
  /// Non-whitespace text after the boundary.
  bool trailing_fragment = false;
};

/// Top-level closed declarations (brace-balanced, with a body for
/// function-like declarations, not ending in a continuation token).
UnitScan scan_dafny_units(std::string_view program);
/// Commands terminated by '.' followed by whitespace or end of text, outside
/// comments and strings.
UnitScan scan_coq_units(std::string_view program);

std::string_view strip_sentinel(std::string_view program, std::string_view sentinel);

class Verifier {
 public:
  explicit Verifier(VerifierSpec spec) : spec_(std::move(spec)) {}
  virtual ~Verifier() = default;

  /// Scores the program part of \p text: -1 if a complete unit fails, 0 if
  /// the text ends inside a unit (or has none), +1 otherwise. Once -1, every
  /// extension is -1.
  virtual Verdict check_partial(const State& text) const = 0;

  /// Verifies a finished program. Open proofs and unterminated units fail.
  virtual FullCheck verify_program(std::string_view program) const = 0;

  /// Program text with the check lemma added where the language expects it.
  virtual std::string inject_check(std::string_view program,
                                   std::string_view check_lemma) const;

  /// True when the language itself marks the end of the program (toy "qed;").
  virtual bool ends_program(std::string_view program) const;

  const VerifierSpec& spec() const noexcept { return spec_; }

 protected:
  VerifierSpec spec_;
};

class ToyVerifier final : public Verifier {
 public:
  ToyVerifier() : Verifier(VerifierSpec::toy()) {}
  explicit ToyVerifier(VerifierSpec spec) : Verifier(std::move(spec)) {}

  Verdict check_partial(const State& text) const override;
  FullCheck verify_program(std::string_view program) const override;
  std::string inject_check(std::string_view program,
                           std::string_view check_lemma) const override;
  bool ends_program(std::string_view program) const override;
};

/// Shared subprocess plumbing for Dafny and Coq. One process per call.
class ExternalVerifier : public Verifier {
 public:
  explicit ExternalVerifier(VerifierSpec spec);

  Verdict check_partial(const State& text) const override;
  FullCheck verify_program(std::string_view program) const override;

 protected:
  virtual UnitScan scan(std::string_view program) const = 0;
  virtual std::string_view file_extension() const = 0;
  /// Whether a failure only reports proofs left open at the end of the file.
  virtual bool only_open_proofs(std::string_view output) const;

  FullCheck run(std::string_view source, bool allow_open_proofs) const;

  std::filesystem::path binary_;
};

class DafnyVerifier final : public ExternalVerifier {
 public:
  explicit DafnyVerifier(VerifierSpec spec) : ExternalVerifier(std::move(spec)) {}

 protected:
  UnitScan scan(std::string_view program) const override;
  std::string_view file_extension() const override { return ".dfy"; }
};

class CoqVerifier final : public ExternalVerifier {
 public:
  explicit CoqVerifier(VerifierSpec spec) : ExternalVerifier(std::move(spec)) {}

 protected:
  UnitScan scan(std::string_view program) const override;
  std::string_view file_extension() const override { return ".v"; }
  bool only_open_proofs(std::string_view output) const override;
};

/// Throws VerifierMissing for dafny/coq when the binary cannot be resolved.
std::unique_ptr<Verifier> make_verifier(const VerifierSpec& spec);

/// Program part of \p text with everything from the sentinel on removed.
std::string program_of(const State& text, const ProblemSpec& problem,
                       const Verifier& verifier);

std::string_view effective_sentinel(const ProblemSpec& problem, const Verifier& verifier);

struct SuccessCheck {
  bool passed = false;
  /// Why it failed. Never mentions the check lemma.
  std::string detail;

  explicit operator bool() const noexcept { return passed; }
};

/// Syntactic gates (proof marker, minimum non-blank lines) and then full
/// verification of the program with the check lemma injected. The injected
/// text exists only in the verifier input.
SuccessCheck check_success(const State& program, const ProblemSpec& problem,
                           const Verifier& verifier);

/// For a text that scored +1: the sentinel was emitted, the language marked
/// the end of the program, or the success check passes.
bool is_complete(const State& text, const ProblemSpec& problem, const Verifier& verifier);

struct Completion {
  bool complete = false;
  /// Present when deciding completeness required running the success check.
  std::optional<SuccessCheck> success;
};

/// is_complete() that also hands back the success check it may have run.
Completion detect_completion(const State& text, const ProblemSpec& problem,
                             const Verifier& verifier);

}  // namespace vermcts

#endif  // VERMCTS_VERIFIER_HPP_
