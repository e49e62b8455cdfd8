// Copyright 2026 The Toolvis Authors
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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "toolvis/store.hpp"

namespace toolvis {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
  std::map<std::string, std::string> kv;
};

CliRun run(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "toolvis");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), in, out, err);
  r.out = out.str();
  r.err = err.str();
  std::istringstream lines(r.out);
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos && line.find(' ') == std::string::npos) {
      r.kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("toolvis_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("CODEVISION_SEED");
  }
  void TearDown() override {
    fs::remove_all(dir_);
    unsetenv("CODEVISION_SEED");
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"gen-bench", "--kind", "mvtool", "--n", "0", "--out", path("b")}).code, kExitUsage);
  EXPECT_EQ(run({"gen-bench", "--kind", "bogus", "--n", "3", "--out", path("b")}).code, kExitUsage);
  EXPECT_EQ(run({"gen-rl", "--n", "3", "--k", "1", "--out", path("r")}).code, kExitUsage);
  EXPECT_EQ(run({"score", "--trajectories", path("t"), "--manifest", path("m"), "--config",
                 "beta9=1"}).code,
            kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST_F(CliTest, DataErrorsExitTwo) {
  const CliRun r = run({"run-policy", "--policy", "oracle", "--manifest", path("missing.jsonl"),
                     "--out", path("t.jsonl")});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, DiagnosticIsReproducible) {
  const CliRun a = run({"gen-bench", "--kind", "diagnostic", "--n", "200", "--seed", "7", "--out",
                     path("a")});
  const CliRun b = run({"gen-bench", "--kind", "diagnostic", "--n", "200", "--seed", "7", "--out",
                     path("b")});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  ASSERT_EQ(b.code, kExitOk) << b.err;
  EXPECT_EQ(a.kv.at("manifest_sha256"), b.kv.at("manifest_sha256"));
  EXPECT_EQ(a.kv.at("items"), "200");
  EXPECT_EQ(a.kv.at("oracle_correct"), "200");
  EXPECT_EQ(a.kv.at("ambiguous"), "0");
  const CliRun c = run({"gen-bench", "--kind", "diagnostic", "--n", "200", "--seed", "8", "--out",
                     path("c")});
  EXPECT_NE(a.kv.at("manifest_sha256"), c.kv.at("manifest_sha256"));
}

TEST_F(CliTest, SeedFallsBackToEnvironment) {
  setenv("CODEVISION_SEED", "7", 1);
  const CliRun env = run({"gen-bench", "--kind", "diagnostic", "--n", "20", "--out", path("e")});
  unsetenv("CODEVISION_SEED");
  const CliRun flag =
      run({"gen-bench", "--kind", "diagnostic", "--n", "20", "--seed", "7", "--out", path("f")});
  ASSERT_EQ(env.code, kExitOk) << env.err;
  EXPECT_EQ(env.kv.at("manifest_sha256"), flag.kv.at("manifest_sha256"));
  setenv("CODEVISION_SEED", "seven", 1);
  EXPECT_EQ(run({"gen-bench", "--kind", "diagnostic", "--n", "20", "--out", path("g")}).code,
            kExitUsage);
}

TEST_F(CliTest, MvtoolPipeline) {
  const CliRun bench = run({"gen-bench", "--kind", "mvtool", "--n", "50", "--seed", "5",
                         "--scene-size", "768", "--config", "scene_words=40,area_threshold=0.002",
                         "--out", path("bench")});
  ASSERT_EQ(bench.code, kExitOk) << bench.err;
  EXPECT_EQ(bench.kv.at("items"), "50");
  int total = 0;
  for (const auto& [k, v] : bench.kv) {
    if (k.rfind("transform_", 0) == 0) {
      EXPECT_EQ(v, "10") << k;
      total += std::stoi(v);
    }
  }
  EXPECT_EQ(total, 50);
  EXPECT_LT(std::stod(bench.kv.at("area_ratio_max")), 0.002);
  EXPECT_EQ(bench.kv.at("positional_cues"), "0");

  const std::string manifest = path("bench/manifest.jsonl");
  const CliRun oracle = run({"run-policy", "--policy", "oracle", "--manifest", manifest, "--out",
                          path("oracle.jsonl")});
  ASSERT_EQ(oracle.code, kExitOk) << oracle.err;
  EXPECT_EQ(oracle.kv.at("correct"), "50");

  const CliRun scored = run({"score", "--trajectories", path("oracle.jsonl"), "--manifest", manifest,
                          "--out", path("oracle_rewards.jsonl")});
  ASSERT_EQ(scored.code, kExitOk) << scored.err;
  EXPECT_EQ(scored.kv.at("traj_match"), "50");
  EXPECT_EQ(scored.kv.at("penalized"), "0");
  for (const RewardRecord& r : read_rewards(path("oracle_rewards.jsonl"))) {
    EXPECT_GT(r.breakdown.traj_match, 0.0);
    EXPECT_EQ(r.breakdown.penalties.sum(), 0);
  }

  const CliRun hacker = run({"run-policy", "--policy", "reward-hacker", "--manifest", manifest,
                          "--out", path("hacker.jsonl")});
  ASSERT_EQ(hacker.code, kExitOk) << hacker.err;
  const CliRun strict = run({"score", "--trajectories", path("hacker.jsonl"), "--manifest", manifest,
                          "--out", path("h_strict.jsonl")});
  const CliRun lax = run({"score", "--trajectories", path("hacker.jsonl"), "--manifest", manifest,
                       "--config", "beta2=0", "--out", path("h_lax.jsonl")});
  ASSERT_EQ(strict.code, kExitOk) << strict.err;
  ASSERT_EQ(lax.code, kExitOk) << lax.err;
  const auto a = read_rewards(path("h_strict.jsonl"));
  const auto b = read_rewards(path("h_lax.jsonl"));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_GT(a[i].breakdown.penalties.sum(), 0);
    EXPECT_GT(b[i].breakdown.total, a[i].breakdown.total);
  }

  const CliRun again = run({"run-policy", "--policy", "oracle", "--manifest", manifest, "--out",
                         path("oracle2.jsonl")});
  EXPECT_EQ(again.kv.at("sha256"), oracle.kv.at("sha256"));
}

TEST_F(CliTest, AreaThresholdBoundsSelectedTargets) {
  const CliRun tight = run({"gen-bench", "--kind", "mvtool", "--n", "20", "--seed", "3",
                         "--scene-size", "768", "--config", "scene_words=40,area_threshold=0.0005",
                         "--out", path("tight")});
  ASSERT_EQ(tight.code, kExitOk) << tight.err;
  EXPECT_LT(std::stod(tight.kv.at("area_ratio_max")), 0.0005);
  const CliRun none = run({"gen-bench", "--kind", "mvtool", "--n", "20", "--seed", "3",
                        "--scene-size", "768", "--config", "scene_words=40,area_threshold=1e-7",
                        "--out", path("none")});
  EXPECT_EQ(none.code, kExitData);
}

TEST_F(CliTest, SftAndRl) {
  const CliRun sft = run({"gen-sft", "--n", "10", "--seed", "2", "--scene-size", "512", "--config",
                       "scene_words=20,area_threshold=0.002", "--out", path("sft")});
  ASSERT_EQ(sft.code, kExitOk) << sft.err;
  EXPECT_EQ(sft.kv.at("tasks"), "10");
  const auto examples = read_training_examples(path("sft/sft.jsonl"));
  EXPECT_EQ(std::to_string(examples.size()), sft.kv.at("examples"));
  for (const auto& ex : examples) {
    ASSERT_GE(ex.segments.size(), 2u);
    EXPECT_EQ(ex.segments.front().mask(), 0);
    EXPECT_EQ(ex.segments.back().mask(), 1);
  }

  const CliRun rl = run({"gen-rl", "--n", "10", "--seed", "2", "--scene-size", "512", "--config",
                      "scene_words=20,area_threshold=0.002", "--out", path("rl")});
  ASSERT_EQ(rl.code, kExitOk) << rl.err;
  EXPECT_EQ(std::stoi(rl.kv.at("kept")) + std::stoi(rl.kv.at("all_correct")) +
                std::stoi(rl.kv.at("all_wrong")),
            10);
  EXPECT_EQ(read_tasks(path("rl/tasks.jsonl")).size(), std::stoul(rl.kv.at("kept")));
}

TEST_F(CliTest, VerifyPasses) {
  const CliRun r = run({"verify", "--seed", "1", "--out", path("v")});
  EXPECT_EQ(r.code, kExitOk) << r.out;
  EXPECT_EQ(r.kv.at("failed"), "0");
  EXPECT_TRUE(fs::exists(path("v/verify.txt")));
}

TEST_F(CliTest, ReplStepsOneTask) {
  ASSERT_EQ(run({"gen-bench", "--kind", "orientation", "--n", "2", "--seed", "4", "--scene-size",
                 "384", "--config", "scene_words=16,area_threshold=0.01", "--out", path("o")})
                .code,
            kExitOk);
  const auto tasks = read_tasks(path("o/manifest.jsonl"));
  ASSERT_FALSE(tasks.empty());
  const TaskSpec& t = tasks.front();
  const std::string input =
      "<think>look</think>\n<code>grayscale()</code>\n\n<think>done</think>\n<answer>" +
      t.gold_answer + "</answer>\n";
  const CliRun r = run({"repl", "--manifest", path("o/manifest.jsonl"), "--task", t.id, "--out",
                     path("human.jsonl")},
                    input);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("EXEC OK applied=[grayscale]"), std::string::npos) << r.out;
  EXPECT_EQ(r.kv.at("termination"), "answered");
  EXPECT_EQ(r.kv.at("turns"), "2");
  EXPECT_EQ(r.kv.at("correct"), "1");
  const auto recs = read_trajectories(path("human.jsonl"));
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].policy, "human");

  const CliRun eof = run({"repl", "--manifest", path("o/manifest.jsonl"), "--task", t.id}, "");
  EXPECT_EQ(eof.kv.at("termination"), "aborted");
  EXPECT_EQ(run({"repl", "--manifest", path("o/manifest.jsonl"), "--task", "nope"}).code,
            kExitUsage);
}

}  // namespace
}  // namespace toolvis
