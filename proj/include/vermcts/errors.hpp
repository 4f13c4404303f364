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

#ifndef VERMCTS_ERRORS_HPP_
#define VERMCTS_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace vermcts {

/// Invalid configuration detected before (or instead of) doing any work.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GeneratorError : public std::runtime_error {
 public:
  enum class Kind { kEndpointUnreachable, kExhausted, kMalformedResponse };

  GeneratorError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Raised when a verifier binary cannot be found or executed.
class VerifierMissing : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ProblemFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StateSpaceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vermcts

#endif  // VERMCTS_ERRORS_HPP_
