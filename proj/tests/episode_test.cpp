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
#include "toolvis/episode.hpp"

namespace toolvis {
namespace {

using testing::answer;
using testing::code;
using testing::make_task;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kInvalidArgument;
}

TEST(TaskTest, ValidateCatchesBrokenInvariants) {
  const Environment env;
  const TaskSpec ok = make_task({ToolId::kRotate180}, TaskType::kSingleTool);
  EXPECT_NO_THROW(validate_task(ok));

  TaskSpec t = ok;
  t.max_turns = 0;
  EXPECT_EQ(code_of([&] { env.reset(t); }), ErrorCode::kInvalidTask);
  t = ok;
  t.initial_image = t.canonical_image;
  EXPECT_EQ(code_of([&] { validate_task(t); }), ErrorCode::kInvalidTask);
  t = ok;
  t.target_box = BBox{0, 0, 2, 2};
  EXPECT_EQ(code_of([&] { validate_task(t); }), ErrorCode::kInvalidTask);
  t = ok;
  t.task_type = TaskType::kNoTool;
  EXPECT_EQ(code_of([&] { validate_task(t); }), ErrorCode::kInvalidTask);
  t = make_task({ToolId::kCrop}, TaskType::kSingleTool);
  EXPECT_EQ(code_of([&] { validate_task(t); }), ErrorCode::kInvalidTask);
  t.target_box = BBox{20, 10, 30, 12};
  EXPECT_EQ(code_of([&] { validate_task(t); }), ErrorCode::kInvalidTask);
  t.target_box = BBox{2, 2, 6, 5};
  EXPECT_NO_THROW(validate_task(t));
  t = make_task({ToolId::kRotate90}, TaskType::kErrorHandling);
  EXPECT_EQ(code_of([&] { validate_task(t); }), ErrorCode::kInvalidTask);
  t.scripted_fault = "rotate90(";
  EXPECT_NO_THROW(validate_task(t));
  t = make_task({ToolId::kRotate90}, TaskType::kMultiTool);
  EXPECT_EQ(code_of([&] { validate_task(t); }), ErrorCode::kInvalidTask);
  t = make_task({ToolId::kGrayscale}, TaskType::kSingleTool);
  EXPECT_EQ(code_of([&] { validate_task(t); }), ErrorCode::kInvalidTask);
}

TEST(EpisodeTest, ResetObservations) {
  const Environment env;
  const TaskSpec none = make_task({}, TaskType::kNoTool);
  EXPECT_EQ(env.reset(none).observation().image, none.canonical_image);
  const TaskSpec r180 = make_task({ToolId::kRotate180}, TaskType::kSingleTool);
  const Observation obs = env.reset(r180).observation();
  EXPECT_EQ(obs.image, apply_transform(r180.canonical_image, TransformKind::kRot180));
  EXPECT_EQ(obs.turn, 0);
  EXPECT_EQ(obs.max_turns, 4);
  EXPECT_EQ(obs.question, r180.question);
  EXPECT_NE(obs.tool_doc.find("crop("), std::string::npos);
}

TEST(EpisodeTest, InverseRestoresCanonical) {
  const Environment env;
  const TaskSpec t = make_task({ToolId::kRotate180}, TaskType::kSingleTool);
  Episode ep = env.reset(t);
  const StepResult r = ep.step(code("rotate180()"));
  EXPECT_FALSE(r.done);
  EXPECT_EQ(r.feedback, "EXEC OK applied=[rotate180]");
  EXPECT_EQ(r.image, t.canonical_image);
  EXPECT_TRUE(ep.frame().upright());
}

TEST(EpisodeTest, FailureLeavesImageAndContinues) {
  const Environment env;
  const TaskSpec t = make_task({ToolId::kRotate90}, TaskType::kSingleTool);
  Episode ep = env.reset(t);
  const Raster before = ep.image();
  const StepResult r = ep.step(code("rotate90() | crop(x0=1"));
  EXPECT_FALSE(r.done);
  EXPECT_EQ(r.image, before);
  EXPECT_EQ(r.feedback, "EXEC ERROR ParseError: unclosed '(' in call to 'crop' at 1:18");
  const StepResult r2 = ep.step(code("flip-horizontal(axis=1)"));
  EXPECT_EQ(r2.feedback.rfind("EXEC ERROR BadArgs: flip-horizontal: unexpected argument 'axis'", 0), 0u);
  EXPECT_EQ(ep.image(), before);
  EXPECT_FALSE(ep.done());
}

TEST(EpisodeTest, AnswerTerminates) {
  const Environment env;
  const TaskSpec t = make_task({}, TaskType::kNoTool);
  Episode ep = env.reset(t);
  const StepResult r = ep.step(answer("Busy Bees"));
  EXPECT_TRUE(r.done);
  EXPECT_EQ(r.feedback, kAnswerReceipt);
  EXPECT_EQ(ep.trajectory().termination, Termination::kAnswered);
  EXPECT_EQ(ep.trajectory().final_answer, "Busy Bees");
  try {
    ep.step(answer("again"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEpisodeTerminated);
    EXPECT_EQ(std::string(e.what()),
              "episode for task 't-no-tool' has already terminated (answered)");
  }
}

TEST(EpisodeTest, TurnBudget) {
  const Environment env;
  TaskSpec t = make_task({ToolId::kRotate90}, TaskType::kSingleTool, std::nullopt, 2);
  Episode ep = env.reset(t);
  EXPECT_FALSE(ep.step(code("grayscale()")).done);
  EXPECT_TRUE(ep.step(code("grayscale()")).done);
  EXPECT_EQ(ep.trajectory().termination, Termination::kTurnBudgetExhausted);
  EXPECT_FALSE(ep.trajectory().final_answer.has_value());
  EXPECT_EQ(ep.trajectory().turns.size(), 2u);
}

TEST(EpisodeTest, MalformedTurnGetsFormatFeedback) {
  const Environment env;
  Episode ep = env.reset(make_task({}, TaskType::kNoTool));
  const StepResult r = ep.step("just words");
  EXPECT_EQ(r.feedback, kFormatError);
  EXPECT_FALSE(r.done);
  EXPECT_FALSE(ep.trajectory().turns[0].outcome.has_value());
  EXPECT_FALSE(format_ok(ep.trajectory()));
}

TEST(ActionTest, Parsing) {
  const AgentAction c = AgentAction::parse("<think>look</think>\n<code>rotate90()</code>");
  EXPECT_EQ(c.kind, ActionKind::kCode);
  EXPECT_EQ(c.think, "look");
  EXPECT_EQ(c.payload, "rotate90()");
  EXPECT_TRUE(c.well_formed);
  const AgentAction a = AgentAction::parse("  <think>x</think><answer> 42 </answer>\n");
  EXPECT_EQ(a.kind, ActionKind::kAnswer);
  EXPECT_TRUE(a.well_formed);
  const AgentAction sloppy = AgentAction::parse("<think>x<answer>7</answer>");
  EXPECT_EQ(sloppy.kind, ActionKind::kAnswer);
  EXPECT_FALSE(sloppy.well_formed);
  EXPECT_FALSE(well_formed("<think>x</think><answer>7</answer> trailing"));
  EXPECT_FALSE(well_formed("<think>x</think><code>a()</code><answer>7</answer>"));
  EXPECT_FALSE(well_formed("<answer>7</answer>"));
  EXPECT_EQ(AgentAction::parse("nothing").kind, ActionKind::kInvalid);
}

TEST(AnswerTest, Normalization) {
  EXPECT_TRUE(check_answer("Busy Bees ", "busy bees"));
  EXPECT_FALSE(check_answer("7", "seven"));
  EXPECT_FALSE(check_answer("", "x"));
  EXPECT_TRUE(check_answer("  The   END.", "the end"));
  EXPECT_TRUE(check_answer("yes!?", "Yes"));
  EXPECT_EQ(normalize_answer("\tA\n B ,. "), "a b");
}

TEST(FormatTest, Examples) {
  const Environment env;
  const TaskSpec t = make_task({ToolId::kRotate90}, TaskType::kSingleTool);
  EXPECT_TRUE(format_ok(replay(env, t, {code("rotate90()"), answer("busy bees")})));
  EXPECT_FALSE(format_ok(replay(env, t, {"<think>oops\n<code>rotate90()</code>", answer("b")})));
  EXPECT_FALSE(format_ok(replay(env, t, {code("rotate90()"), answer("b") + " extra"})));
}

TEST(ReplayTest, Deterministic) {
  const Environment env;
  const TaskSpec t = make_task({ToolId::kFlipVertical, ToolId::kCrop}, TaskType::kMultiTool,
                               BBox{3, 2, 9, 6}, 6);
  const std::vector<std::string> actions = {code("crop(x0=1, y0=1, x1=99, y1=99)"),
                                            code("flip-vertical() | crop(x0=2, y0=1, x1=10, y1=7)"),
                                            "bad", answer("busy bees")};
  const Trajectory a = replay(env, t, actions);
  const Trajectory b = replay(env, t, actions);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.turns.size(), 4u);
  EXPECT_EQ(a.termination, Termination::kAnswered);
  for (const Turn& turn : a.turns) {
    EXPECT_EQ(turn.outcome.has_value(), turn.action.kind == ActionKind::kCode);
  }
}

TEST(FrameTest, InitialFrameFollowsRequiredTools) {
  const TaskSpec t = make_task({ToolId::kRotate90, ToolId::kFlipHorizontal, ToolId::kCrop},
                               TaskType::kMultiTool, BBox{1, 1, 4, 4});
  Frame f = initial_frame(t);
  EXPECT_FALSE(f.upright());
  f = f.after_transform(TransformKind::kRot90).after_transform(TransformKind::kFlipH);
  EXPECT_TRUE(f.upright());
  EXPECT_EQ(f.view(), t.canonical_image.bounds());
}

}  // namespace
}  // namespace toolvis
