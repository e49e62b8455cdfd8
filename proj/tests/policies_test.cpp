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

#include "test_support.hpp"
#include "toolvis/datagen.hpp"
#include "toolvis/policies.hpp"
#include "toolvis/verify.hpp"

namespace toolvis {
namespace {

using testing::make_task;

PolicySpec spec(PolicyKind kind, std::uint64_t seed = 0, std::optional<ToolId> opt = std::nullopt,
                bool wrong = false) {
  return PolicySpec{kind, seed, opt, wrong};
}

Trajectory run(PolicySpec p, const TaskSpec& t) {
  static const Environment env;
  return run_episode(env, p, std::make_shared<const TaskSpec>(t));
}

int failures(const Trajectory& t) {
  int n = 0;
  for (const Turn& turn : t.turns) n += turn.outcome && !turn.outcome->ok();
  return n;
}

TEST(PolicyTest, Names) {
  for (PolicyKind k : {PolicyKind::kOracle, PolicyKind::kTrialAndError, PolicyKind::kRewardHacker,
                       PolicyKind::kClumsy, PolicyKind::kRandom}) {
    EXPECT_EQ(policy_kind_from_name(policy_kind_name(k)), k);
  }
  EXPECT_FALSE(policy_kind_from_name("genius").has_value());
}

TEST(PolicyTest, OracleOnRotate180) {
  const TaskSpec t = make_task({ToolId::kRotate180}, TaskType::kSingleTool);
  const RewardBreakdown b = score_trajectory(run(spec(PolicyKind::kOracle), t), t, RewardConfig{});
  EXPECT_NEAR(b.total, 2.6, 1e-12);
  EXPECT_EQ(b.penalties.sum(), 0);
}

TEST(PolicyTest, RewardHackerOnRotate180) {
  const TaskSpec t = make_task({ToolId::kRotate180}, TaskType::kSingleTool);
  const Trajectory traj = run(spec(PolicyKind::kRewardHacker), t);
  EXPECT_EQ(traj.code_turns(), 3);
  const RewardBreakdown b = score_trajectory(traj, t, RewardConfig{});
  EXPECT_EQ(b.penalties.turn_limit, 1);
  EXPECT_LT(b.total, 2.6);
}

TEST(PolicyTest, ClumsyFlipThenRotate) {
  const TaskSpec t = make_task({ToolId::kRotate90}, TaskType::kSingleTool);
  const Trajectory traj = run(spec(PolicyKind::kClumsy), t);
  ASSERT_GE(traj.turns.size(), 3u);
  EXPECT_EQ(traj.turns[0].action.payload, "flip-horizontal()");
  EXPECT_NE(traj.turns[1].action.payload.find("rotate90()"), std::string::npos);
  EXPECT_TRUE(traj.final_answer && check_answer(*traj.final_answer, t.gold_answer));
}

TEST(PolicyTest, ClumsyRecoversFromScriptedFault) {
  TaskSpec t = make_task({ToolId::kFlipVertical}, TaskType::kErrorHandling);
  for (const char* fault : {"flip-horizontal(axis=1)", "rotate(angle=90)", "rotate90(",
                            "crop(x0=34, y0=26, x1=74, y1=66)"}) {
    t.scripted_fault = fault;
    const Trajectory traj = run(spec(PolicyKind::kClumsy), t);
    ASSERT_GE(traj.turns.size(), 2u);
    EXPECT_EQ(traj.turns[0].action.payload, fault);
    EXPECT_EQ(failures(traj), 1) << fault;
    EXPECT_TRUE(traj.turns[1].outcome && traj.turns[1].outcome->ok());
    EXPECT_EQ(outcome_reward(traj, t).r_acc, 1);
  }
}

TEST(PolicyTest, TrialAndErrorFindsOrientation) {
  for (ToolId tool : kOrientationTools) {
    const TaskSpec t = make_task({tool}, TaskType::kSingleTool, std::nullopt, 8);
    const Trajectory traj = run(spec(PolicyKind::kTrialAndError), t);
    EXPECT_EQ(traj.termination, Termination::kAnswered);
    EXPECT_EQ(outcome_reward(traj, t).r_acc, 1) << tool_name(tool);
  }
}

TEST(PolicyTest, DeterministicPerSeed) {
  const TaskSpec t = make_task({ToolId::kRotate270, ToolId::kCrop}, TaskType::kMultiTool,
                               BBox{2, 2, 6, 6}, 8);
  EXPECT_EQ(run(spec(PolicyKind::kRandom, 5), t), run(spec(PolicyKind::kRandom, 5), t));
  bool differs = false;
  for (std::uint64_t s = 0; s < 20 && !differs; ++s) {
    differs = !(run(spec(PolicyKind::kRandom, s), t) == run(spec(PolicyKind::kRandom, 5), t));
  }
  EXPECT_TRUE(differs);
  for (const Turn& turn : run(spec(PolicyKind::kRandom, 9), t).turns) {
    if (turn.action.kind == ActionKind::kCode) {
      EXPECT_NO_THROW(parse(turn.action.payload));
    }
  }
}

TEST(PolicyTest, SimulatedReading) {
  const TaskSpec t = make_task({ToolId::kRotate90, ToolId::kCrop}, TaskType::kMultiTool, BBox{2, 2, 6, 6});
  Frame f = initial_frame(t);
  EXPECT_EQ(simulated_reading(t, f), kUnreadable);
  f = f.after_transform(TransformKind::kRot90);
  EXPECT_EQ(simulated_reading(t, f), kUnreadable);
  EXPECT_EQ(simulated_reading(t, f.after_crop(BBox{1, 1, 8, 8})), t.gold_answer);
  EXPECT_EQ(simulated_reading(t, f.after_crop(BBox{3, 3, 8, 8})), kUnreadable);
}

TEST(PolicyTest, OracleOnGeneratedTasks) {
  const RewardConfig cfg;
  for (const TaskSpec& t : gen_tasks(compact_gen_config(31), 40)) {
    const RewardBreakdown o = score_trajectory(run(spec(PolicyKind::kOracle), t), t, cfg);
    EXPECT_EQ(o.r_acc, 1) << t.id;
    EXPECT_EQ(o.penalties.sum(), 0) << t.id;
    EXPECT_EQ(o.traj_match, t.s_req.empty() ? 0.0 : 0.5) << t.id;
    const RewardBreakdown h = score_trajectory(run(spec(PolicyKind::kRewardHacker), t), t, cfg);
    EXPECT_LT(h.total, o.total) << t.id;
  }
}

TEST(GroupTest, NecessityWorkedExample) {
  const TaskSpec t = make_task({ToolId::kRotate180}, TaskType::kSingleTool);
  const std::vector<PolicySpec> mix = {
      spec(PolicyKind::kOracle, 0, ToolId::kGrayscale),
      spec(PolicyKind::kOracle, 1, ToolId::kGrayscale),
      spec(PolicyKind::kOracle, 2, ToolId::kGrayscale),
      spec(PolicyKind::kOracle, 3, ToolId::kGrayscale, true),
      spec(PolicyKind::kTrialAndError, 4),
      spec(PolicyKind::kTrialAndError, 5, std::nullopt, true),
      spec(PolicyKind::kTrialAndError, 6, std::nullopt, true),
      spec(PolicyKind::kTrialAndError, 7, std::nullopt, true),
  };
  static const Environment env;
  const GroupRollout g = rollout_group(env, mix, std::make_shared<const TaskSpec>(t), 8, RewardConfig{});
  EXPECT_EQ(g.stats.tool_size(), 4);
  EXPECT_EQ(g.stats.tool_successes(), 3);
  EXPECT_EQ(g.stats.notool_successes(), 1);
  EXPECT_DOUBLE_EQ(g.r_nec, 0.5);
  EXPECT_DOUBLE_EQ(g.breakdowns[0].nec_bonus, 0.5);
  EXPECT_DOUBLE_EQ(g.breakdowns[3].nec_bonus, 0.0);
  EXPECT_DOUBLE_EQ(g.breakdowns[4].nec_bonus, 0.0);
}

TEST(GroupTest, AllOraclesAreDropped) {
  const TaskSpec t = make_task({ToolId::kFlipHorizontal}, TaskType::kSingleTool);
  const std::vector<PolicySpec> mix = {spec(PolicyKind::kOracle)};
  static const Environment env;
  const GroupRollout g = rollout_group(env, mix, std::make_shared<const TaskSpec>(t), 8, RewardConfig{});
  std::vector<bool> ok;
  for (const auto& b : g.breakdowns) ok.push_back(b.r_acc == 1);
  EXPECT_EQ(ok, std::vector<bool>(8, true));
  EXPECT_FALSE(difficulty_filter(ok));
  EXPECT_THROW(rollout_group(env, mix, std::make_shared<const TaskSpec>(t), 1, RewardConfig{}), Error);
}

TEST(GroupTest, RandomsOnHardTaskAreDropped) {
  const TaskSpec t = make_task({ToolId::kRotate270, ToolId::kCrop}, TaskType::kMultiTool,
                               BBox{3, 3, 5, 4});
  std::vector<PolicySpec> mix;
  for (std::uint64_t s = 0; s < 8; ++s) mix.push_back(spec(PolicyKind::kRandom, s));
  static const Environment env;
  const GroupRollout g = rollout_group(env, mix, std::make_shared<const TaskSpec>(t), 8, RewardConfig{});
  std::vector<bool> ok;
  for (const auto& b : g.breakdowns) ok.push_back(b.r_acc == 1);
  EXPECT_EQ(ok, std::vector<bool>(8, false));
  EXPECT_FALSE(difficulty_filter(ok));
}

}  // namespace
}  // namespace toolvis
