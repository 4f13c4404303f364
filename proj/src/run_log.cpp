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

#include "vermcts/run_log.hpp"

#include <ctime>

#include "vermcts/errors.hpp"

namespace vermcts {

using nlohmann::json;

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kVerMcts: return "vermcts";
    case Method::kWhole: return "whole";
    case Method::kRollout: return "rollout";
    case Method::kReflexion: return "reflexion";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "vermcts") return Method::kVerMcts;
  if (name == "whole") return Method::kWhole;
  if (name == "rollout") return Method::kRollout;
  if (name == "reflexion") return Method::kReflexion;
  throw ConfigError("unknown method '" + std::string(name) +
                    "' (expected vermcts, whole, rollout or reflexion)");
}

std::size_t RunLog::event_tokens() const {
  std::size_t total = 0;
  for (const auto& e : events) total += e.tokens;
  return total;
}

json to_json(const RunLog& log) {
  json events = json::array();
  for (const auto& e : log.events) {
    json je{{"iteration", e.iteration}, {"tokens", e.tokens}, {"verdict", e.verdict}};
    if (e.tree)
      je["tree"] = {{"nodes", e.tree->nodes}, {"depth", e.tree->depth}, {"width", e.tree->width}};
    events.push_back(std::move(je));
  }
  return json{
      {"problem_id", log.problem_id},
      {"method", log.method},
      {"seed", log.seed},
      {"started_at", log.started_at},
      {"elapsed_seconds", log.elapsed_seconds},
      {"config", log.config},
      {"events", std::move(events)},
      {"outcome",
       {{"status", log.outcome.status == RunStatus::kSuccess ? "success" : "exhausted"},
        {"total_tokens", log.outcome.total_tokens},
        {"program", log.outcome.program},
        {"reason", log.outcome.reason}}},
  };
}

RunLog run_log_from_json(const json& j) {
  RunLog log;
  log.problem_id = j.at("problem_id").get<std::string>();
  log.method = j.at("method").get<std::string>();
  log.seed = j.at("seed").get<std::uint64_t>();
  log.started_at = j.value("started_at", std::string());
  log.elapsed_seconds = j.value("elapsed_seconds", 0.0);
  log.config = j.value("config", json::object());
  for (const auto& je : j.at("events")) {
    RunEvent e;
    e.iteration = je.at("iteration").get<std::size_t>();
    e.tokens = je.at("tokens").get<std::size_t>();
    e.verdict = je.at("verdict").get<int>();
    if (je.contains("tree")) {
      const auto& t = je.at("tree");
      e.tree = TreeStats{t.at("nodes").get<std::size_t>(), t.at("depth").get<std::size_t>(),
                         t.at("width").get<std::size_t>()};
    }
    log.events.push_back(std::move(e));
  }
  const auto& o = j.at("outcome");
  const auto status = o.at("status").get<std::string>();
  if (status == "success") log.outcome.status = RunStatus::kSuccess;
  else if (status == "exhausted") log.outcome.status = RunStatus::kExhausted;
  else throw std::runtime_error("unknown outcome status '" + status + "'");
  log.outcome.total_tokens = o.at("total_tokens").get<std::size_t>();
  log.outcome.program = o.value("program", std::string());
  log.outcome.reason = o.value("reason", std::string());
  return log;
}

std::string serialize_run_log(const RunLog& log) { return to_json(log).dump(); }

json normalize_timestamps(json j) {
  j.erase("started_at");
  j.erase("elapsed_seconds");
  return j;
}

std::string normalized_line(const RunLog& log) {
  return normalize_timestamps(to_json(log)).dump();
}

std::string utc_timestamp_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

TokenMeter::TokenMeter(std::size_t max_tokens,
                       std::optional<std::chrono::milliseconds> wall_clock_limit)
    : max_tokens_(max_tokens),
      wall_clock_limit_(wall_clock_limit),
      start_(std::chrono::steady_clock::now()) {}

bool TokenMeter::exhausted() const { return !reason().empty(); }

std::string TokenMeter::reason() const {
  if (spent_ >= max_tokens_) return "token budget";
  if (wall_clock_limit_ && std::chrono::steady_clock::now() - start_ >= *wall_clock_limit_)
    return "wall clock";
  return {};
}

double TokenMeter::elapsed_seconds() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

}  // namespace vermcts
