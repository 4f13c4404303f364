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

#include "vermcts/cli.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"
#include "vermcts/experiment.hpp"
#include "vermcts/export.hpp"
#include "vermcts/process.hpp"

namespace vermcts {
namespace {

using testing::read_text;
using testing::source_dir;
using testing::write_file;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

std::string suite() { return (source_dir() / "problems").string(); }

std::string script(const std::string& id) {
  return (source_dir() / "problems" / "scripts" / (id + ".script")).string();
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, kExitConfigError);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitConfigError);
  EXPECT_EQ(cli({"run"}).code, kExitConfigError);
  EXPECT_EQ(cli({"run", "--problem", "x", "--seed", "abc"}).code, kExitConfigError);
  const Result help = cli({"--help"});
  EXPECT_EQ(help.code, kExitSuccess);
  EXPECT_NE(help.out.find("experiment"), std::string::npos);
}

TEST(Cli, RunScriptedSuccess) {
  TempDir dir;
  const Result r = cli({"run", "--suite", suite(), "--problem", "toy_constant", "--script",
                        script("toy_constant"), "--out-dir", dir.path().string(), "--seed", "3"});
  ASSERT_EQ(r.code, kExitSuccess) << r.err;
  EXPECT_EQ(r.out.rfind("resolved config:\n", 0), 0u);
  EXPECT_NE(r.out.find("\"seed\": 3"), std::string::npos);
  EXPECT_NE(r.out.find("status: success\n"), std::string::npos);
  const auto program = dir.path() / "programs" / "toy_constant" / "vermcts" / "seed-3.toy";
  EXPECT_EQ(read_text(program), "def e = 3 + 4;\nqed;\n");
  EXPECT_TRUE(std::filesystem::exists(run_log_path(dir.path(), "toy_constant", "vermcts", 3)));
}

TEST(Cli, ExhaustedRunExitsTwo) {
  TempDir dir;
  const Result r = cli({"run", "--suite", suite(), "--problem", "toy_unsat", "--generator",
                        "grammar", "--max-tokens", "200", "--out-dir", dir.path().string()});
  EXPECT_EQ(r.code, kExitExhausted) << r.err;
  EXPECT_NE(r.out.find("status: exhausted\n"), std::string::npos);
  EXPECT_NE(r.out.find("reason: token budget\n"), std::string::npos);
  const Result zero = cli({"run", "--suite", suite(), "--problem", "toy_constant", "--method",
                           "whole", "--max-tokens", "0", "--out-dir", dir.path().string()});
  EXPECT_EQ(zero.code, kExitExhausted) << zero.err;
  EXPECT_NE(zero.out.find("total_tokens: 0\n"), std::string::npos);
}

TEST(Cli, ConfigErrorsExitOne) {
  TempDir dir;
  Result r = cli({"run", "--suite", suite(), "--problem", "no_such", "--out-dir",
                  dir.path().string()});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("unknown problem 'no_such'"), std::string::npos);
  r = cli({"run", "--suite", suite(), "--problem", "toy_constant", "--method", "beam"});
  EXPECT_EQ(r.code, kExitConfigError);
  r = cli({"validate", "--config", (dir.path() / "missing.json").string()});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("cannot read config"), std::string::npos);
  r = cli({"report"});
  EXPECT_EQ(r.code, kExitConfigError);
}

TEST(Cli, Validate) {
  const Result r =
      cli({"validate", "--config", (source_dir() / "configs" / "toy_experiment.json").string()});
  ASSERT_EQ(r.code, kExitSuccess) << r.err;
  EXPECT_NE(r.out.find("ok: 5 problems, toy\n"), std::string::npos);
  EXPECT_NE(r.out.find("\"max_tokens\": 2000"), std::string::npos);
}

TEST(Cli, ExperimentThenReport) {
  TempDir dir;
  const std::string out = dir.path().string();
  const Result e = cli({"experiment", "--suite", suite(), "--problem", "toy_single_assert",
                        "--generator", "grammar", "-n", "3", "--max-tokens", "300", "--out-dir",
                        out});
  ASSERT_EQ(e.code, kExitSuccess) << e.err;
  EXPECT_NE(e.out.find("problem,method,runs,T,pass_rate,wilson_lo,wilson_hi\n"),
            std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "curves.csv"));

  const Result r1 = cli({"report", "--out-dir", out, "--step", "100"});
  ASSERT_EQ(r1.code, kExitSuccess) << r1.err;
  EXPECT_NE(r1.out.find("wrote "), std::string::npos);
  const std::string a = read_text(dir.path() / "curves.csv");
  const Result r2 = cli({"report", "--out-dir", out, "--step", "100"});
  EXPECT_EQ(r2.code, kExitSuccess);
  EXPECT_EQ(read_text(dir.path() / "curves.csv"), a);
  EXPECT_EQ(a.substr(0, a.find('\n')), kCurveCsvHeader);

  const auto bad = dir.path() / "runs" / "zzz" / "seed-1.jsonl";
  write_file(bad, "not json\n");
  const Result r3 = cli({"report", "--out-dir", out});
  EXPECT_EQ(r3.code, kExitConfigError);
  EXPECT_NE(r3.err.find(bad.string() + ":1: "), std::string::npos) << r3.err;
}

}  // namespace
}  // namespace vermcts
