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

#ifndef VERMCTS_RUN_LOG_HPP_
#define VERMCTS_RUN_LOG_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace vermcts {

enum class Method { kVerMcts, kWhole, kRollout, kReflexion };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

struct TreeStats {
  std::size_t nodes = 1;  // regular nodes only
  std::size_t depth = 1;  // longest regular chain, root counted
  std::size_t width = 0;  // most regular children of any node

  friend bool operator==(const TreeStats&, const TreeStats&) = default;
};

struct RunEvent {
  std::size_t iteration = 0;
  std::size_t tokens = 0;  // spent during this iteration
  int verdict = 0;
  std::optional<TreeStats> tree;
};

enum class RunStatus { kSuccess, kExhausted };

struct RunOutcome {
  RunStatus status = RunStatus::kExhausted;
  std::size_t total_tokens = 0;
  std::string program;  // the successful program (prompt excluded)
  std::string reason;   // why an exhausted run stopped
};

/// One run of one method on one problem. Serialized as a single JSON line.
struct RunLog {
  std::string problem_id;
  std::string method;
  std::uint64_t seed = 0;
  std::vector<RunEvent> events;
  RunOutcome outcome;
  nlohmann::json config = nlohmann::json::object();
  std::string started_at;
  double elapsed_seconds = 0.0;

  std::size_t event_tokens() const;
  bool succeeded_within(std::size_t tokens) const {
    return outcome.status == RunStatus::kSuccess && outcome.total_tokens <= tokens;
  }
};

nlohmann::json to_json(const RunLog& log);
RunLog run_log_from_json(const nlohmann::json& j);

std::string serialize_run_log(const RunLog& log);

/// Drops wall-clock fields so that seeded reruns compare byte-for-byte.
nlohmann::json normalize_timestamps(nlohmann::json j);
std::string normalized_line(const RunLog& log);

std::string utc_timestamp_now();

/// Tracks tokens spent and the wall clock against a budget.
class TokenMeter {
 public:
  TokenMeter(std::size_t max_tokens,
             std::optional<std::chrono::milliseconds> wall_clock_limit);

  void add(std::size_t tokens) noexcept { spent_ += tokens; }
  std::size_t spent() const noexcept { return spent_; }
  bool exhausted() const;
  /// "token budget" / "wall clock", or empty while not exhausted.
  std::string reason() const;
  double elapsed_seconds() const;

 private:
  std::size_t max_tokens_;
  std::optional<std::chrono::milliseconds> wall_clock_limit_;
  std::chrono::steady_clock::time_point start_;
  std::size_t spent_ = 0;
};

}  // namespace vermcts

#endif  // VERMCTS_RUN_LOG_HPP_
