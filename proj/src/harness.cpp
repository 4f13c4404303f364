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

#include "vermcts/harness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vermcts/errors.hpp"
#include "vermcts/text.hpp"

namespace vermcts {

double pass_at_T(std::span<const RunLog> runs, std::size_t tokens) {
  if (runs.empty()) throw std::invalid_argument("pass_at_T: no runs");
  std::size_t ok = 0;
  for (const auto& r : runs)
    if (r.succeeded_within(tokens)) ++ok;
  return static_cast<double>(ok) / static_cast<double>(runs.size());
}

Interval wilson_interval(std::size_t successes, std::size_t n, double z) {
  if (successes > n) throw std::invalid_argument("wilson_interval: successes > n");
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::vector<std::size_t> token_grid(std::size_t max_tokens, std::size_t step) {
  if (step == 0) throw ConfigError("curve step must be positive");
  std::vector<std::size_t> grid;
  for (std::size_t t = step; t <= max_tokens; t += step) grid.push_back(t);
  if (grid.empty() || grid.back() != max_tokens) grid.push_back(max_tokens);
  return grid;
}

PassCurve pass_curve(std::span<const RunLog> runs, std::string problem, std::string method,
                     std::span<const std::size_t> grid) {
  PassCurve c{std::move(problem), std::move(method), runs.size(), {}};
  for (std::size_t t : grid) {
    std::size_t ok = 0;
    for (const auto& r : runs)
      if (r.succeeded_within(t)) ++ok;
    const Interval w = wilson_interval(ok, runs.size());
    c.points.push_back(CurvePoint{t, pass_at_T(runs, t), w.lo, w.hi});
  }
  return c;
}

PassCurve average_curves(std::span<const PassCurve> per_problem, std::string method) {
  PassCurve avg{"all", std::move(method), 0, {}};
  if (per_problem.empty()) return avg;
  const std::size_t points = per_problem.front().points.size();
  avg.points.resize(points);
  for (const auto& c : per_problem) {
    if (c.points.size() != points) throw std::invalid_argument("average_curves: grid mismatch");
    avg.runs += c.runs;
    for (std::size_t i = 0; i < points; ++i) {
      avg.points[i].tokens = c.points[i].tokens;
      avg.points[i].pass_rate += c.points[i].pass_rate;
      avg.points[i].wilson_lo += c.points[i].wilson_lo;
      avg.points[i].wilson_hi += c.points[i].wilson_hi;
    }
  }
  const double k = static_cast<double>(per_problem.size());
  for (auto& p : avg.points) {
    p.pass_rate /= k;
    p.wilson_lo /= k;
    p.wilson_hi /= k;
  }
  return avg;
}

std::vector<PassCurve> compute_curves(std::span<const RunLog> runs,
                                      std::span<const std::size_t> grid) {
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::vector<RunLog>> groups;
  std::vector<std::string> methods;
  for (const auto& r : runs) {
    auto key = std::make_pair(r.problem_id, r.method);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) keys.push_back(key);
    it->second.push_back(r);
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);
  }
  std::vector<PassCurve> curves;
  for (const auto& key : keys) curves.push_back(pass_curve(groups[key], key.first, key.second, grid));
  const std::size_t per_problem = curves.size();
  for (const auto& m : methods) {
    std::vector<PassCurve> mine;
    for (std::size_t i = 0; i < per_problem; ++i)
      if (curves[i].method == m) mine.push_back(curves[i]);
    curves.push_back(average_curves(mine, m));
  }
  return curves;
}

std::vector<TreeStatPoint> tree_stat_series(std::span<const RunLog> runs,
                                            std::span<const std::size_t> grid) {
  const std::string vermcts(to_string(Method::kVerMcts));
  std::vector<std::string> problems;
  std::map<std::string, std::vector<const RunLog*>> by_problem;
  for (const auto& r : runs) {
    if (r.method != vermcts) continue;
    auto& v = by_problem[r.problem_id];
    if (v.empty()) problems.push_back(r.problem_id);
    v.push_back(&r);
  }
  std::vector<TreeStatPoint> out;
  for (const auto& problem : problems) {
    const auto& logs = by_problem[problem];
    for (std::size_t t : grid) {
      TreeStatPoint p{problem, t, 0.0, 0.0, 0.0};
      for (const RunLog* log : logs) {
        TreeStats last;
        std::size_t cumulative = 0;
        for (const auto& e : log->events) {
          cumulative += e.tokens;
          if (cumulative > t) break;
          if (e.tree) last = *e.tree;
        }
        p.nodes += static_cast<double>(last.nodes);
        p.depth += static_cast<double>(last.depth);
        p.width += static_cast<double>(last.width);
      }
      const double n = static_cast<double>(logs.size());
      p.nodes /= n;
      p.depth /= n;
      p.width /= n;
      out.push_back(std::move(p));
    }
  }
  return out;
}

BruteForceOracle::BruteForceOracle(std::vector<std::string> actions, const Verifier& verifier,
                                   const ProblemSpec& problem, BruteForceOptions options)
    : actions_(std::move(actions)), verifier_(verifier), problem_(problem), options_(options) {}

std::optional<int> BruteForceOracle::terminal_value(const State& state) const {
  const Verdict v = verifier_.check_partial(state);
  if (v.score == Score::kFail) return -1;
  const std::string_view sentinel = effective_sentinel(problem_, verifier_);
  const bool ended = (!sentinel.empty() && state.program().find(sentinel) != std::string_view::npos) ||
                     verifier_.ends_program(program_of(state, problem_, verifier_));
  if (ended) return check_success(state, problem_, verifier_).passed ? 1 : -1;
  if (v.score == Score::kPass && check_success(state, problem_, verifier_).passed) return 1;
  return std::nullopt;
}

int BruteForceOracle::value(const State& state, std::size_t horizon) {
  std::string key = state.text();
  key += '\x1f';
  key += std::to_string(horizon);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  int result;
  if (auto t = terminal_value(state)) {
    result = *t;
  } else if (horizon == 0 || actions_.empty()) {
    result = 0;
  } else {
    if (++expanded_ > options_.node_cap)
      throw StateSpaceTooLarge("brute force oracle expanded more than " +
                               std::to_string(options_.node_cap) + " states");
    result = -1;
    for (const auto& a : actions_) {
      const State next = transition(state, Action{a, whitespace_token_count(a)});
      result = std::max(result, value(next, horizon - 1));
      if (result == 1) break;
    }
  }
  memo_.emplace(std::move(key), result);
  return result;
}

int brute_force_value(const State& state, std::span<const std::string> actions,
                      const Verifier& verifier, const ProblemSpec& problem,
                      BruteForceOptions options) {
  BruteForceOracle oracle(std::vector<std::string>(actions.begin(), actions.end()), verifier,
                          problem, options);
  return oracle.value(state);
}

}  // namespace vermcts
