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

#ifndef VERMCTS_HARNESS_HPP_
#define VERMCTS_HARNESS_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vermcts/mdp.hpp"
#include "vermcts/problem.hpp"
#include "vermcts/run_log.hpp"
#include "vermcts/verifier.hpp"

namespace vermcts {

inline constexpr double kWilsonZ95 = 1.96;

/// Fraction of runs that succeeded using at most \p tokens tokens.
double pass_at_T(std::span<const RunLog> runs, std::size_t tokens);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for a binomial proportion, clamped to [0, 1].
Interval wilson_interval(std::size_t successes, std::size_t n, double z = kWilsonZ95);

struct CurvePoint {
  std::size_t tokens = 0;
  double pass_rate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
};

struct PassCurve {
  std::string problem;  // "all" for method averages
  std::string method;
  std::size_t runs = 0;
  std::vector<CurvePoint> points;
};

/// step, 2*step, ..., up to and including max_tokens.
std::vector<std::size_t> token_grid(std::size_t max_tokens, std::size_t step);

PassCurve pass_curve(std::span<const RunLog> runs, std::string problem, std::string method,
                     std::span<const std::size_t> grid);

/// One curve per (problem, method) in first-seen order, then one "all"
/// curve per method averaging the per-problem pass rates and bounds.
std::vector<PassCurve> compute_curves(std::span<const RunLog> runs,
                                      std::span<const std::size_t> grid);

PassCurve average_curves(std::span<const PassCurve> per_problem, std::string method);

struct TreeStatPoint {
  std::string problem;
  std::size_t tokens = 0;
  double nodes = 0.0;
  double depth = 0.0;
  double width = 0.0;
};

/// Mean tree statistics of the VerMCTS runs of each problem at each grid
/// point, using the last snapshot taken at or before that many tokens.
std::vector<TreeStatPoint> tree_stat_series(std::span<const RunLog> runs,
                                            std::span<const std::size_t> grid);

struct BruteForceOptions {
  std::size_t horizon = 4;
  std::size_t node_cap = 100000;
};

/// Optimal value by exhaustive search over \p actions up to the horizon:
/// -1 for verified failures, +1/-1 for complete programs by the success
/// check, 0 for states that cannot terminate within the horizon. A test
/// oracle; throws StateSpaceTooLarge past node_cap.
class BruteForceOracle {
 public:
  BruteForceOracle(std::vector<std::string> actions, const Verifier& verifier,
                   const ProblemSpec& problem, BruteForceOptions options = {});

  int value(const State& state) { return value(state, options_.horizon); }
  int value(const State& state, std::size_t horizon);

  /// Whether \p state is terminal, and its reward if so.
  std::optional<int> terminal_value(const State& state) const;

  const std::vector<std::string>& actions() const noexcept { return actions_; }
  std::size_t expanded() const noexcept { return expanded_; }

 private:
  std::vector<std::string> actions_;
  const Verifier& verifier_;
  const ProblemSpec& problem_;
  BruteForceOptions options_;
  std::unordered_map<std::string, int> memo_;
  std::size_t expanded_ = 0;
};

int brute_force_value(const State& state, std::span<const std::string> actions,
                      const Verifier& verifier, const ProblemSpec& problem,
                      BruteForceOptions options = {});

}  // namespace vermcts

#endif  // VERMCTS_HARNESS_HPP_
