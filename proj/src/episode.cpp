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

#include "toolvis/episode.hpp"

#include <algorithm>

namespace toolvis {
namespace {

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kCodeOpen = "<code>";
constexpr std::string_view kCodeClose = "</code>";
constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kAnswerClose = "</answer>";
constexpr std::string_view kAllTags[] = {kThinkOpen, kThinkClose,  kCodeOpen,
                                         kCodeClose, kAnswerOpen, kAnswerClose};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool has_tag(std::string_view s) {
  return std::any_of(std::begin(kAllTags), std::end(kAllTags),
                     [&](std::string_view t) { return s.find(t) != std::string_view::npos; });
}

bool consume(std::string_view& s, std::string_view prefix) {
  if (s.substr(0, prefix.size()) != prefix) return false;
  s.remove_prefix(prefix.size());
  return true;
}

// Contents of the first open...close block, if both occur in order.
std::optional<std::pair<std::size_t, std::string_view>> find_block(std::string_view s,
                                                                   std::string_view open,
                                                                   std::string_view close) {
  const auto b = s.find(open);
  if (b == std::string_view::npos) return std::nullopt;
  const auto start = b + open.size();
  const auto e = s.find(close, start);
  if (e == std::string_view::npos) return std::nullopt;
  return std::make_pair(b, s.substr(start, e - start));
}

[[noreturn]] void invalid(const TaskSpec& task, const std::string& why) {
  throw Error(ErrorCode::kInvalidTask, "task '" + task.id + "': " + why);
}

}  // namespace

std::string_view task_type_name(TaskType type) {
  switch (type) {
    case TaskType::kSingleTool: return "single-tool";
    case TaskType::kMultiTool: return "multi-tool";
    case TaskType::kMultiCrop: return "multi-crop";
    case TaskType::kErrorHandling: return "error-handling";
    case TaskType::kNoTool: return "no-tool";
  }
  return "";
}

std::optional<TaskType> task_type_from_name(std::string_view name) {
  for (TaskType t : kAllTaskTypes) {
    if (task_type_name(t) == name) return t;
  }
  return std::nullopt;
}

void validate_task(const TaskSpec& task) {
  if (task.id.empty()) invalid(task, "empty id");
  if (task.max_turns < 1) {
    invalid(task, "max_turns must be positive, got " + std::to_string(task.max_turns));
  }
  bool has_crop = false;
  for (ToolId id : task.s_req) {
    if (std::find(kMustUseTools.begin(), kMustUseTools.end(), id) == kMustUseTools.end()) {
      invalid(task, "'" + std::string(tool_name(id)) + "' is not a must-use tool");
    }
    has_crop = has_crop || id == ToolId::kCrop;
  }
  const std::size_t n = task.s_req.size();
  if ((n == 0) != (task.task_type == TaskType::kNoTool)) {
    invalid(task, "s_req must be empty exactly for no-tool tasks");
  }
  switch (task.task_type) {
    case TaskType::kSingleTool:
      if (n != 1) invalid(task, "single-tool tasks require exactly one tool");
      break;
    case TaskType::kMultiTool:
      if (n < 2) invalid(task, "multi-tool tasks require at least two tools");
      break;
    case TaskType::kMultiCrop:
      if (n < 2 || std::any_of(task.s_req.begin(), task.s_req.end(),
                               [](ToolId id) { return id != ToolId::kCrop; })) {
        invalid(task, "multi-crop tasks require two or more crop steps and nothing else");
      }
      break;
    case TaskType::kErrorHandling:
      if (!task.scripted_fault) invalid(task, "error-handling tasks require a scripted fault");
      break;
    case TaskType::kNoTool:
      break;
  }
  if (task.target_box.has_value() != has_crop) {
    invalid(task, "target_box must be present exactly when crop is required");
  }
  if (task.target_box && (!task.target_box->valid() ||
                          !task.canonical_image.bounds().contains(*task.target_box))) {
    invalid(task, "target_box " + to_string(*task.target_box) + " is not inside the " +
                      std::to_string(task.canonical_image.width()) + "x" +
                      std::to_string(task.canonical_image.height()) + " canonical image");
  }
  Raster img = task.initial_image;
  for (ToolId id : task.s_req) {
    if (const auto kind = transform_for_tool(id)) img = apply_transform(img, *kind);
  }
  if (!(img == task.canonical_image)) {
    invalid(task, "applying the required orientation tools to the initial image does not "
                  "recover the canonical image");
  }
}

Frame initial_frame(const TaskSpec& task) {
  Frame f(task.canonical_image.width(), task.canonical_image.height());
  for (auto it = task.s_req.rbegin(); it != task.s_req.rend(); ++it) {
    if (const auto kind = transform_for_tool(*it)) f = f.after_transform(inverse(*kind));
  }
  return f;
}

Frame advance_frame(Frame frame, const std::vector<AppliedCall>& applied) {
  for (const AppliedCall& call : applied) {
    if (call.orientation) frame = frame.after_transform(*call.orientation);
    if (call.region) frame = frame.after_crop(*call.region);
  }
  return frame;
}

bool well_formed(std::string_view raw) {
  std::string_view s = trim(raw);
  if (!consume(s, kThinkOpen)) return false;
  const auto close = s.find(kThinkClose);
  if (close == std::string_view::npos || has_tag(s.substr(0, close))) return false;
  s = trim(s.substr(close + kThinkClose.size()));
  std::string_view end_tag;
  if (consume(s, kCodeOpen)) {
    end_tag = kCodeClose;
  } else if (consume(s, kAnswerOpen)) {
    end_tag = kAnswerClose;
  } else {
    return false;
  }
  const auto end = s.find(end_tag);
  if (end == std::string_view::npos || has_tag(s.substr(0, end))) return false;
  return trim(s.substr(end + end_tag.size())).empty();
}

AgentAction AgentAction::parse(std::string raw_text) {
  AgentAction a;
  a.well_formed = toolvis::well_formed(raw_text);
  const std::string_view s = raw_text;
  if (const auto think = find_block(s, kThinkOpen, kThinkClose)) a.think = think->second;
  const auto answer = find_block(s, kAnswerOpen, kAnswerClose);
  const auto code = find_block(s, kCodeOpen, kCodeClose);
  if (answer) {
    a.kind = ActionKind::kAnswer;
    a.payload = trim(answer->second);
  } else if (code) {
    a.kind = ActionKind::kCode;
    a.payload = code->second;
  }
  a.raw_text = std::move(raw_text);
  return a;
}

AgentAction AgentAction::code(std::string_view think, std::string_view program) {
  return parse("<think>" + std::string(think) + "</think>\n<code>" + std::string(program) +
               "</code>");
}

AgentAction AgentAction::answer(std::string_view think, std::string_view text) {
  return parse("<think>" + std::string(think) + "</think>\n<answer>" + std::string(text) +
               "</answer>");
}

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::kAnswered: return "answered";
    case Termination::kTurnBudgetExhausted: return "turn-budget-exhausted";
    case Termination::kAborted: return "aborted";
  }
  return "";
}

std::optional<Termination> termination_from_name(std::string_view name) {
  for (Termination t :
       {Termination::kAnswered, Termination::kTurnBudgetExhausted, Termination::kAborted}) {
    if (termination_name(t) == name) return t;
  }
  return std::nullopt;
}

int Trajectory::code_turns() const {
  return static_cast<int>(std::count_if(turns.begin(), turns.end(), [](const Turn& t) {
    return t.action.kind == ActionKind::kCode;
  }));
}

std::string normalize_answer(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : trim(text)) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  while (!out.empty() && (std::string_view(".,;:!?").find(out.back()) != std::string_view::npos ||
                          out.back() == ' ')) {
    out.pop_back();
  }
  return out;
}

bool check_answer(std::string_view pred, std::string_view gold) {
  return normalize_answer(pred) == normalize_answer(gold);
}

bool format_ok(const Trajectory& traj) {
  return std::all_of(traj.turns.begin(), traj.turns.end(),
                     [](const Turn& t) { return t.action.well_formed; });
}

std::string render_feedback(const Turn& turn) {
  switch (turn.action.kind) {
    case ActionKind::kCode: return render_outcome(*turn.outcome);
    case ActionKind::kAnswer: return std::string(kAnswerReceipt);
    case ActionKind::kInvalid: return std::string(kFormatError);
  }
  return "";
}

std::string render_prompt(const TaskSpec& task, const ToolRegistry& registry) {
  return "<image>\n" + task.question +
         "\n\nAvailable tools (chain calls with '|'):\n" + registry.describe() +
         "\nReply with <think>...</think> followed by either <code>program</code> or "
         "<answer>final answer</answer>.";
}

Episode::Episode(std::shared_ptr<const TaskSpec> task,
                 std::shared_ptr<const ToolRegistry> registry, ExecOptions options)
    : task_(std::move(task)),
      registry_(std::move(registry)),
      options_(options),
      image_(task_->initial_image),
      frame_(initial_frame(*task_)) {
  traj_.task_id = task_->id;
}

Observation Episode::observation() const {
  return Observation{task_->question,
                     image_,
                     registry_->describe(),
                     static_cast<int>(traj_.turns.size()),
                     task_->max_turns,
                     frame_};
}

StepResult Episode::step(std::string_view raw_text) {
  return step(AgentAction::parse(std::string(raw_text)));
}

StepResult Episode::step(const AgentAction& action) {
  if (done()) {
    throw Error(ErrorCode::kEpisodeTerminated,
                "episode for task '" + task_->id + "' has already terminated (" +
                    std::string(termination_name(*traj_.termination)) + ")");
  }
  Turn turn{action, std::nullopt, image_};
  if (action.kind == ActionKind::kCode) {
    ExecOutcome outcome = execute(std::string_view(action.payload), image_, *registry_, options_);
    if (outcome.ok()) {
      image_ = outcome.success().result;
      frame_ = advance_frame(frame_, outcome.success().applied);
    }
    turn.outcome = std::move(outcome);
  } else if (action.kind == ActionKind::kAnswer) {
    traj_.final_answer = action.payload;
    traj_.termination = Termination::kAnswered;
  }
  turn.image_after = image_;
  std::string feedback = render_feedback(turn);
  traj_.turns.push_back(std::move(turn));
  if (!done() && static_cast<int>(traj_.turns.size()) >= task_->max_turns) {
    traj_.termination = Termination::kTurnBudgetExhausted;
  }
  return StepResult{std::move(feedback), image_, done()};
}

void Episode::abort() {
  if (done()) {
    throw Error(ErrorCode::kEpisodeTerminated,
                "episode for task '" + task_->id + "' has already terminated");
  }
  traj_.termination = Termination::kAborted;
}

Environment::Environment(ToolRegistry registry, ExecOptions options)
    : registry_(std::make_shared<const ToolRegistry>(std::move(registry))), options_(options) {}

Episode Environment::reset(std::shared_ptr<const TaskSpec> task) const {
  if (!task) throw Error(ErrorCode::kInvalidTask, "reset: null task");
  validate_task(*task);
  return Episode(std::move(task), registry_, options_);
}

Episode Environment::reset(const TaskSpec& task) const {
  return reset(std::make_shared<const TaskSpec>(task));
}

Trajectory replay(const Environment& env, const TaskSpec& task,
                  const std::vector<std::string>& raw_actions) {
  Episode ep = env.reset(task);
  for (const std::string& raw : raw_actions) ep.step(raw);
  return ep.trajectory();
}

}  // namespace toolvis
