// Copyright 2026 The Arena Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>

#include "arena/json_io.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace arena {
namespace {

using ::arena::testing::DataPath;
using ::arena::testing::TempDir;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult RunArena(const std::string& args) {
  const std::string cmd = std::string(ARENA_BINARY) + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  RunResult r;
  if (!pipe) return r;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir();
    const RunResult r =
        RunArena("simulate --config " + DataPath("sim_small.json").string() + " --out " + Sim(""));
    ASSERT_EQ(r.exit_code, 0) << r.out;
  }
  static void TearDownTestSuite() { delete dir_; }
  static std::string Sim(const std::string& name) { return (dir_->path() / name).string(); }
  static TempDir* dir_;
};

TempDir* CliTest::dir_ = nullptr;

TEST_F(CliTest, SimulateWritesEveryArtifact) {
  for (const char* f : {"benchmark.jsonl", "models.json", "images.jsonl", "anchors.jsonl",
                        "evaluators.jsonl", "matches.jsonl", "mos.jsonl", "truth.json",
                        "service.json"}) {
    EXPECT_TRUE(std::filesystem::exists(Sim(f))) << f;
  }
  EXPECT_EQ(LoadMatches(Sim("matches.jsonl")).size(), 6000u);
}

TEST_F(CliTest, SimulateIsByteIdentical) {
  TempDir other;
  ASSERT_EQ(RunArena("simulate --config " + DataPath("sim_small.json").string() + " --out " +
                other.path().string())
                .exit_code,
            0);
  for (const char* f : {"matches.jsonl", "mos.jsonl", "images.jsonl"}) {
    EXPECT_EQ(ReadFile(Sim(f)), ReadFile(other / f)) << f;
  }
}

TEST_F(CliTest, FitPrintsOrderedRows) {
  const RunResult r = RunArena("fit --in " + Sim("matches.jsonl") + " --baseline m_base");
  ASSERT_EQ(r.exit_code, 0);
  const Json rows = Json::parse(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0]["model_id"], "m_gamma");
  EXPECT_EQ(rows[3]["model_id"], "m_base");
  EXPECT_EQ(rows[3]["elo"], 1000.0);
}

TEST_F(CliTest, BootstrapIsDeterministic) {
  const std::string args = "bootstrap --in " + Sim("matches.jsonl") +
                           " --baseline m_base -B 100 --seed 3";
  const RunResult a = RunArena(args), b = RunArena(args);
  ASSERT_EQ(a.exit_code, 0);
  EXPECT_EQ(a.out, b.out);
  const Json j = Json::parse(a.out);
  EXPECT_EQ(j["B"], 100);
  EXPECT_FALSE(j["rows"][0]["ci_low"].is_null());
}

TEST_F(CliTest, ReportsRun) {
  EXPECT_EQ(RunArena("prompt-elo --in " + Sim("matches.jsonl") + " --baseline m_base --model m_beta")
                .exit_code,
            0);
  const RunResult mos = RunArena("mos-report --mos " + Sim("mos.jsonl") + " --images " +
                            Sim("images.jsonl") + " --benchmark " + Sim("benchmark.jsonl") +
                            " --compare m_gamma m_base");
  ASSERT_EQ(mos.exit_code, 0);
  EXPECT_TRUE(Json::parse(mos.out).contains("comparisons"));
  const RunResult qc = RunArena("qc --matches " + Sim("matches.jsonl") + " --anchors " +
                           Sim("anchors.jsonl") + " --evaluators " + Sim("evaluators.jsonl"));
  ASSERT_EQ(qc.exit_code, 0);
  EXPECT_EQ(Json::parse(qc.out)["evaluators"].size(), 10u);
  const RunResult w = RunArena("weights --matches " + Sim("matches.jsonl") + " --mos " +
                          Sim("mos.jsonl") + " --images " + Sim("images.jsonl"));
  EXPECT_EQ(w.exit_code, 0);
}

TEST_F(CliTest, LintBenchmark) {
  const RunResult r = RunArena("lint-benchmark " + DataPath("benchmark_synthetic.jsonl").string() +
                          " --rules " + DataPath("lint_rules.json").string());
  ASSERT_EQ(r.exit_code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_TRUE(j["findings"].empty());
  EXPECT_TRUE(j["distribution"]["pass"].get<bool>());
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(RunArena("--help").exit_code, 0);
  EXPECT_EQ(RunArena("frobnicate").exit_code, 1);
  EXPECT_EQ(RunArena("fit --in " + Sim("matches.jsonl")).exit_code, 1);  // missing --baseline
  EXPECT_EQ(RunArena("fit --in " + Sim("matches.jsonl") + " --baseline nobody").exit_code, 1);
  EXPECT_EQ(RunArena("fit --in " + Sim("no_such_file.jsonl") + " --baseline m_base").exit_code, 2);
  EXPECT_EQ(RunArena("bootstrap --in " + Sim("matches.jsonl") + " --baseline m_base -B 10").exit_code,
            1);
}

}  // namespace
}  // namespace arena
