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

#ifndef TOOLVIS_EPISODE_HPP_
#define TOOLVIS_EPISODE_HPP_

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "toolvis/geometry.hpp"
#include "toolvis/raster.hpp"
#include "toolvis/toolprog.hpp"

namespace toolvis {

enum class TaskType { kSingleTool, kMultiTool, kMultiCrop, kErrorHandling, kNoTool };

inline constexpr std::array<TaskType, 5> kAllTaskTypes = {
    TaskType::kSingleTool, TaskType::kMultiTool, TaskType::kMultiCrop, TaskType::kErrorHandling,
    TaskType::kNoTool};

// "single-tool", "multi-tool", "multi-crop", "error-handling", "no-tool".
std::string_view task_type_name(TaskType type);
std::optional<TaskType> task_type_from_name(std::string_view name);

struct TaskSpec {
  std::string id;
  std::string question;
  Raster initial_image;
  Raster canonical_image;
  std::string gold_answer;
  TaskType task_type = TaskType::kNoTool;
  std::vector<ToolId> s_req;
  std::optional<BBox> target_box;  // canonical coordinates
  int max_turns = 3;
  // Error-handling tasks: a faulty program a clumsy agent tries first.
  std::optional<std::string> scripted_fault;

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

inline int default_max_turns(std::size_t required_tools) {
  return static_cast<int>(required_tools) + 3;
}

// Throws Error(kInvalidTask) describing the first violated invariant.
void validate_task(const TaskSpec& task);

// Frame of the initial image relative to the canonical one: the inverses of
// the required orientation tools, applied in reverse order.
Frame initial_frame(const TaskSpec& task);

// Frame after the given successfully applied calls.
Frame advance_frame(Frame frame, const std::vector<AppliedCall>& applied);

enum class ActionKind { kCode, kAnswer, kInvalid };

struct AgentAction {
  std::string raw_text;
  ActionKind kind = ActionKind::kInvalid;
  std::string think;
  std::string payload;  // program text or answer text
  bool well_formed = false;

  // Strict check for well_formed; extraction is lenient: an <answer> block
  // wins over a <code> block, anything else is kInvalid.
  static AgentAction parse(std::string raw_text);
  static AgentAction code(std::string_view think, std::string_view program);
  static AgentAction answer(std::string_view think, std::string_view text);

  friend bool operator==(const AgentAction&, const AgentAction&) = default;
};

// <think>...</think> followed by exactly one <code> or <answer> block,
// nothing else but surrounding whitespace.
bool well_formed(std::string_view raw_text);

struct Turn {
  AgentAction action;
  std::optional<ExecOutcome> outcome;  // code actions only
  Raster image_after;

  friend bool operator==(const Turn&, const Turn&) = default;
};

enum class Termination { kAnswered, kTurnBudgetExhausted, kAborted };

std::string_view termination_name(Termination t);
std::optional<Termination> termination_from_name(std::string_view name);

struct Trajectory {
  std::string task_id;
  std::vector<Turn> turns;
  std::optional<std::string> final_answer;
  std::optional<Termination> termination;

  bool terminated() const { return termination.has_value(); }
  int code_turns() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

std::string normalize_answer(std::string_view text);
bool check_answer(std::string_view pred, std::string_view gold);
bool format_ok(const Trajectory& traj);

inline constexpr std::string_view kAnswerReceipt = "ANSWER RECEIVED";
inline constexpr std::string_view kFormatError =
    "FORMAT ERROR: expected <think>...</think> followed by one <code> or <answer> block";

// Text returned to the agent for a turn.
std::string render_feedback(const Turn& turn);

// The user message that opens an episode.
std::string render_prompt(const TaskSpec& task, const ToolRegistry& registry);

struct Observation {
  std::string question;
  Raster image;
  std::string tool_doc;
  int turn = 0;  // turns taken so far
  int max_turns = 0;
  // Ground-truth bookkeeping: maps the working image to the canonical one.
  Frame frame{1, 1};
};

struct StepResult {
  std::string feedback;
  Raster image;
  bool done = false;
};

class Episode {
 public:
  const TaskSpec& task() const { return *task_; }
  Observation observation() const;

  // Throws Error(kEpisodeTerminated) once done.
  StepResult step(std::string_view raw_text);
  StepResult step(const AgentAction& action);
  // Ends a live episode with kAborted.
  void abort();

  bool done() const { return traj_.terminated(); }
  const Trajectory& trajectory() const { return traj_; }
  const Raster& image() const { return image_; }
  const Frame& frame() const { return frame_; }

 private:
  friend class Environment;
  Episode(std::shared_ptr<const TaskSpec> task, std::shared_ptr<const ToolRegistry> registry,
          ExecOptions options);

  std::shared_ptr<const TaskSpec> task_;
  std::shared_ptr<const ToolRegistry> registry_;
  ExecOptions options_;
  Raster image_;
  Frame frame_;
  Trajectory traj_;
};

class Environment {
 public:
  explicit Environment(ToolRegistry registry = ToolRegistry::builtin(), ExecOptions options = {});

  // Throws Error(kInvalidTask).
  Episode reset(std::shared_ptr<const TaskSpec> task) const;
  Episode reset(const TaskSpec& task) const;

  const ToolRegistry& registry() const { return *registry_; }
  const ExecOptions& options() const { return options_; }

 private:
  std::shared_ptr<const ToolRegistry> registry_;
  ExecOptions options_;
};

// Re-runs recorded action texts from a fresh reset.
Trajectory replay(const Environment& env, const TaskSpec& task,
                  const std::vector<std::string>& raw_actions);

}  // namespace toolvis

#endif  // TOOLVIS_EPISODE_HPP_
