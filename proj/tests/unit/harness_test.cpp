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

#include <gtest/gtest.h>

#include "vermcts/errors.hpp"

namespace vermcts {
namespace {

RunLog make_run(std::string problem, std::string method, bool success, std::size_t tokens) {
  RunLog r;
  r.problem_id = std::move(problem);
  r.method = std::move(method);
  r.outcome.status = success ? RunStatus::kSuccess : RunStatus::kExhausted;
  r.outcome.total_tokens = tokens;
  r.events.push_back(RunEvent{1, tokens, success ? 1 : -1, std::nullopt});
  return r;
}

struct WilsonCase {
  std::size_t k, n;
  double lo, hi;
};

TEST(Wilson, MatchesReferenceValues) {
  // Reference: statsmodels proportion_confint(method="wilson", alpha=0.05).
  const WilsonCase cases[] = {
      {0, 10, 0.0, 0.27753279986288926},
      {5, 10, 0.23659309051256394, 0.7634069094874361},
      {10, 10, 0.7224672001371106, 1.0},
      {3, 20, 0.052368745896216595, 0.36041886474075696},
      {17, 20, 0.639581135259243, 0.9476312541037833},
      {1, 100, 0.001767432064140647, 0.05448619617870533},
      {50, 100, 0.4038315303659956, 0.5961684696340044},
  };
  for (const auto& c : cases) {
    const Interval w = wilson_interval(c.k, c.n);
    EXPECT_NEAR(w.lo, c.lo, 1e-4) << c.k << "/" << c.n;
    EXPECT_NEAR(w.hi, c.hi, 1e-4) << c.k << "/" << c.n;
  }
}

TEST(Wilson, EdgeCases) {
  const Interval empty = wilson_interval(0, 0);
  EXPECT_EQ(empty.lo, 0.0);
  EXPECT_EQ(empty.hi, 1.0);
  EXPECT_THROW(wilson_interval(3, 2), std::invalid_argument);
  for (std::size_t n = 1; n < 40; ++n)
    for (std::size_t k = 0; k <= n; ++k) {
      const Interval w = wilson_interval(k, n);
      const double p = static_cast<double>(k) / static_cast<double>(n);
      EXPECT_LE(w.lo, p + 1e-12);
      EXPECT_GE(w.hi, p - 1e-12);
      EXPECT_GE(w.lo, 0.0);
      EXPECT_LE(w.hi, 1.0);
    }
}

TEST(PassAtT, CountsSuccessesWithinBudget) {
  const std::vector<RunLog> runs = {make_run("p", "m", true, 100), make_run("p", "m", true, 300),
                                    make_run("p", "m", false, 500), make_run("p", "m", true, 301)};
  EXPECT_DOUBLE_EQ(pass_at_T(runs, 99), 0.0);
  EXPECT_DOUBLE_EQ(pass_at_T(runs, 100), 0.25);
  EXPECT_DOUBLE_EQ(pass_at_T(runs, 300), 0.5);
  EXPECT_DOUBLE_EQ(pass_at_T(runs, 301), 0.75);
  EXPECT_DOUBLE_EQ(pass_at_T(runs, 100000), 0.75);
  EXPECT_THROW(pass_at_T(std::span<const RunLog>{}, 10), std::invalid_argument);
}

TEST(TokenGrid, IncludesTheBudget) {
  EXPECT_EQ(token_grid(500, 100), (std::vector<std::size_t>{100, 200, 300, 400, 500}));
  EXPECT_EQ(token_grid(250, 100), (std::vector<std::size_t>{100, 200, 250}));
  EXPECT_EQ(token_grid(50, 100), (std::vector<std::size_t>{50}));
  EXPECT_THROW(token_grid(50, 0), ConfigError);
}

TEST(Curves, PerProblemThenAverage) {
  const std::vector<RunLog> runs = {
      make_run("a", "vermcts", true, 100), make_run("a", "vermcts", false, 400),
      make_run("b", "vermcts", true, 250), make_run("b", "vermcts", true, 50),
      make_run("a", "whole", false, 400),
  };
  const auto grid = token_grid(400, 200);
  const auto curves = compute_curves(runs, grid);
  ASSERT_EQ(curves.size(), 5u);
  EXPECT_EQ(curves[0].problem, "a");
  EXPECT_EQ(curves[0].method, "vermcts");
  EXPECT_EQ(curves[1].problem, "b");
  EXPECT_EQ(curves[2].method, "whole");
  EXPECT_EQ(curves[3].problem, "all");
  EXPECT_EQ(curves[3].method, "vermcts");
  EXPECT_EQ(curves[3].runs, 4u);
  EXPECT_EQ(curves[4].method, "whole");

  EXPECT_DOUBLE_EQ(curves[0].points[0].pass_rate, 0.5);
  EXPECT_DOUBLE_EQ(curves[1].points[0].pass_rate, 0.5);
  EXPECT_DOUBLE_EQ(curves[1].points[1].pass_rate, 1.0);
  EXPECT_DOUBLE_EQ(curves[3].points[1].pass_rate, 0.75);
  const Interval a = wilson_interval(1, 2);
  const Interval b = wilson_interval(2, 2);
  EXPECT_DOUBLE_EQ(curves[3].points[1].wilson_lo, (a.lo + b.lo) / 2);
  EXPECT_DOUBLE_EQ(curves[3].points[1].wilson_hi, (a.hi + b.hi) / 2);
  EXPECT_DOUBLE_EQ(curves[2].points[1].pass_rate, 0.0);
}

TEST(Curves, AverageRejectsGridMismatch) {
  PassCurve x{"a", "m", 1, {{1, 0, 0, 1}}};
  PassCurve y{"b", "m", 1, {{1, 0, 0, 1}, {2, 0, 0, 1}}};
  const std::vector<PassCurve> both = {x, y};
  EXPECT_THROW(average_curves(both, "m"), std::invalid_argument);
  EXPECT_TRUE(average_curves(std::span<const PassCurve>{}, "m").points.empty());
}

TEST(TreeSeries, UsesLastSnapshotWithinBudget) {
  RunLog r;
  r.problem_id = "p";
  r.method = "vermcts";
  r.events = {RunEvent{1, 10, 1, TreeStats{2, 2, 1}}, RunEvent{2, 10, 1, TreeStats{3, 3, 1}},
              RunEvent{3, 30, -1, TreeStats{3, 3, 1}}, RunEvent{4, 10, 1, TreeStats{5, 3, 2}}};
  RunLog s = r;
  s.events = {RunEvent{1, 100, 1, TreeStats{7, 4, 3}}};
  RunLog w = make_run("p", "whole", false, 10);
  const std::vector<RunLog> runs = {r, s, w};
  const std::vector<std::size_t> grid = {5, 20, 60, 100};
  const auto series = tree_stat_series(runs, grid);
  ASSERT_EQ(series.size(), 4u);
  EXPECT_DOUBLE_EQ(series[0].nodes, 1.0);
  EXPECT_DOUBLE_EQ(series[1].nodes, 2.0);
  EXPECT_DOUBLE_EQ(series[2].nodes, 3.0);
  EXPECT_DOUBLE_EQ(series[2].width, 1.0);
  EXPECT_DOUBLE_EQ(series[2].depth, 2.0);
  EXPECT_DOUBLE_EQ(series[3].nodes, 6.0);
  EXPECT_DOUBLE_EQ(series[3].depth, 3.5);
  EXPECT_EQ(series[3].problem, "p");
}

ProblemSpec toy(std::string lemma) {
  ProblemSpec p;
  p.id = "t";
  p.language = Language::kToy;
  p.prompt = "Task.\n";
  p.check_lemma = std::move(lemma);
  return p;
}

TEST(BruteForce, FindsOptimalValues) {
  ToyVerifier v;
  const ProblemSpec sat = toy("assert a == 3;");
  const std::vector<std::string> actions = {"def a = 1;\n", "def a = 3;\n", "qed;\n"};
  const State root = render_prompt(sat);
  EXPECT_EQ(brute_force_value(root, actions, v, sat, {1, 1000}), 0);
  EXPECT_EQ(brute_force_value(root, actions, v, sat, {2, 1000}), 1);
  EXPECT_EQ(brute_force_value(root, std::vector<std::string>{"def a = 1;\n"}, v, sat, {3, 1000}),
            0);

  const ProblemSpec unsat = toy("assert 1 == 2;");
  EXPECT_EQ(brute_force_value(root, actions, v, unsat, {4, 1000}), 0);
  const std::vector<std::string> closing = {"assert 1 == 2;\n", "qed;\n"};
  EXPECT_EQ(brute_force_value(root, closing, v, unsat, {4, 1000}), -1);

  BruteForceOracle oracle(actions, v, sat, {3, 1000});
  EXPECT_EQ(oracle.terminal_value(transition(root, Action{"def a = 3;\nqed;\n", 5})), 1);
  EXPECT_EQ(oracle.terminal_value(transition(root, Action{"qed;\n", 1})), -1);
  EXPECT_EQ(oracle.terminal_value(transition(root, Action{"def 1", 2})), -1);
  EXPECT_FALSE(oracle.terminal_value(transition(root, Action{"def a = 1;\n", 4})));
}

TEST(BruteForce, NodeCap) {
  ToyVerifier v;
  const ProblemSpec p = toy("assert 1 == 2;");
  const std::vector<std::string> actions = {"def a = 1;\n", "def b = 2;\n", "def c = 3;\n"};
  EXPECT_THROW(brute_force_value(render_prompt(p), actions, v, p, {8, 50}), StateSpaceTooLarge);
}

}  // namespace
}  // namespace vermcts
