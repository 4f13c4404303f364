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

#ifndef VERMCTS_PROCESS_HPP_
#define VERMCTS_PROCESS_HPP_

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vermcts {

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string output;  // stdout and stderr, interleaved
};

/// Runs argv[0] (searched on PATH) and waits up to \p timeout, killing the
/// child's process group on expiry.
ProcessResult run_process(const std::vector<std::string>& argv,
                          std::chrono::milliseconds timeout);

/// Resolves a bare name through PATH, or checks an explicit path.
std::optional<std::filesystem::path> find_executable(std::string_view name_or_path);

/// mkdtemp-backed scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace vermcts

#endif  // VERMCTS_PROCESS_HPP_
