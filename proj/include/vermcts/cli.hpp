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

#ifndef VERMCTS_CLI_HPP_
#define VERMCTS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace vermcts {

/// Exit codes shared by every subcommand.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitExhausted = 2;

/// Entry point of the `vermcts` tool: run | experiment | report | validate.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vermcts

#endif  // VERMCTS_CLI_HPP_
