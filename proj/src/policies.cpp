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

#include "toolvis/policies.hpp"

#include <algorithm>

#include "toolvis/datagen.hpp"

namespace toolvis {
namespace {

constexpr ToolId kTrialOrder[] = {ToolId::kRotate90, ToolId::kRotate180, ToolId::kRotate270,
                                  ToolId::kFlipHorizontal, ToolId::kFlipVertical};

std::string call(ToolId id) { return std::string(tool_name(id)) + "()"; }

std::string crop_call(const BBox& b) {
  return "crop(x0=" + std::to_string(b.x0) + ", y0=" + std::to_string(b.y0) +
         ", x1=" + std::to_string(b.x1) + ", y1=" + std::to_string(b.y1) + ")";
}

ToolId undo(ToolId orientation) {
  return *tool_for_transform(inverse(*transform_for_tool(orientation)));
}

AgentAction answer_action(const PolicySpec& p, const TaskSpec& task, const Observation& obs) {
  const std::string text =
      p.force_wrong_answer ? std::string(kUnreadable) : simulated_reading(task, obs.frame);
  return AgentAction::answer("the view is ready; reading the text", text);
}

std::uint64_t id_hash(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : s) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
  return h;
}

AgentAction act_oracle(const PolicySpec& p, const TaskSpec& task, const Observation& obs,
                       std::size_t step) {
  const auto plan = oracle_plan(task, p.optional_tool);
  if (step < plan.size()) return AgentAction::code("apply the next required tool", plan[step]);
  return answer_action(p, task, obs);
}

AgentAction act_trial(const PolicySpec& p, const TaskSpec& task, const Observation& obs,
                      std::size_t step) {
  const auto found = detect_transform(task.canonical_image, obs.image);
  const bool canonical =
      std::find(found.begin(), found.end(), TransformKind::kIdentity) != found.end();
  if (canonical || step >= std::size(kTrialOrder)) return answer_action(p, task, obs);
  if (step == 0) return AgentAction::code("try a rotation", call(kTrialOrder[0]));
  return AgentAction::code("undo the last guess and try the next one",
                           call(undo(kTrialOrder[step - 1])) + " | " + call(kTrialOrder[step]));
}

AgentAction act_hacker(const PolicySpec& p, const TaskSpec& task, const Observation& obs,
                       std::size_t step) {
  std::vector<std::string> plan;
  for (ToolId id : task.s_req) {
    if (category(id) == ToolCategory::kOrientation) plan.push_back(call(id));
  }
  while (plan.size() + 1 < static_cast<std::size_t>(task.max_turns)) {
    plan.push_back(call(ToolId::kRotate90));
  }
  if (step < plan.size()) return AgentAction::code("more tools cannot hurt", plan[step]);
  return answer_action(p, task, obs);
}

AgentAction act_clumsy(const PolicySpec& p, const TaskSpec& task, const Observation& obs,
                       const std::vector<Turn>& history) {
  const auto plan = oracle_plan(task, p.optional_tool);
  std::optional<ToolId> first_orientation;
  for (ToolId id : task.s_req) {
    if (category(id) == ToolCategory::kOrientation) {
      first_orientation = id;
      break;
    }
  }
  const ToolId wrong = first_orientation == ToolId::kFlipHorizontal ? ToolId::kFlipVertical
                                                                    : ToolId::kFlipHorizontal;
  const std::size_t step = history.size();
  if (step == 0) {
    if (task.scripted_fault) return AgentAction::code("flip it", *task.scripted_fault);
    if (first_orientation) return AgentAction::code("flip it", call(wrong));
    return AgentAction::code("cut out the region", "crop(x0=0");
  }
  const Turn& first = history.front();
  const bool first_failed = first.outcome && !first.outcome->ok();
  if (first_failed || !first_orientation) {
    if (step - 1 < plan.size()) {
      return AgentAction::code("the error shows the call was wrong; use the right tool",
                               plan[step - 1]);
    }
    return answer_action(p, task, obs);
  }
  if (step == 1) {
    const std::string rest = plan.empty() ? "" : " | " + plan[0];
    return AgentAction::code("that flip was wrong; undo it and use the right tool",
                             call(undo(wrong)) + rest);
  }
  if (step - 1 < plan.size()) return AgentAction::code("continue", plan[step - 1]);
  return answer_action(p, task, obs);
}

AgentAction act_random(const PolicySpec& p, const TaskSpec& task, const Observation& obs,
                       std::size_t step) {
  Rng rng(derive_seed(derive_seed(p.seed, id_hash(task.id)), step));
  if (static_cast<int>(step) + 1 >= task.max_turns || rng.bernoulli(0.25)) {
    return answer_action(p, task, obs);
  }
  const int n = static_cast<int>(rng.uniform_int(1, 2));
  std::string program;
  int w = obs.image.width();
  int h = obs.image.height();
  for (int i = 0; i < n; ++i) {
    const ToolId id = kBuiltinTools[static_cast<std::size_t>(rng.uniform_int(0, 11))];
    std::string c;
    switch (id) {
      case ToolId::kCrop: {
        const int x0 = static_cast<int>(rng.uniform_int(0, w - 1));
        const int y0 = static_cast<int>(rng.uniform_int(0, h - 1));
        const int x1 = static_cast<int>(rng.uniform_int(x0 + 1, w));
        const int y1 = static_cast<int>(rng.uniform_int(y0 + 1, h));
        c = crop_call(BBox{x0, y0, x1, y1});
        w = x1 - x0;
        h = y1 - y0;
        break;
      }
      case ToolId::kBrightness:
      case ToolId::kContrast:
        c = std::string(tool_name(id)) + "(factor=" +
            render_value(0.5 + 0.1 * static_cast<double>(rng.uniform_int(0, 10))) + ")";
        break;
      case ToolId::kBlur:
        c = "blur(radius=" + std::to_string(rng.uniform_int(1, 3)) + ")";
        break;
      default:
        c = call(id);
        if (const auto k = transform_for_tool(id); k && swaps_dims(*k)) std::swap(w, h);
        break;
    }
    program += (program.empty() ? "" : " | ") + c;
  }
  return AgentAction::code("try something", program);
}

}  // namespace

std::string_view policy_kind_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kOracle: return "oracle";
    case PolicyKind::kTrialAndError: return "trial-and-error";
    case PolicyKind::kRewardHacker: return "reward-hacker";
    case PolicyKind::kClumsy: return "clumsy";
    case PolicyKind::kRandom: return "random";
  }
  return "";
}

std::optional<PolicyKind> policy_kind_from_name(std::string_view name) {
  for (PolicyKind k : {PolicyKind::kOracle, PolicyKind::kTrialAndError, PolicyKind::kRewardHacker,
                       PolicyKind::kClumsy, PolicyKind::kRandom}) {
    if (policy_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::string simulated_reading(const TaskSpec& task, const Frame& frame) {
  if (!frame.upright()) return std::string(kUnreadable);
  if (task.target_box) {
    const BBox view = frame.view();
    if (view == task.canonical_image.bounds() || !view.contains(*task.target_box)) {
      return std::string(kUnreadable);
    }
  }
  return task.gold_answer;
}

std::vector<std::string> oracle_plan(const TaskSpec& task, std::optional<ToolId> optional_tool) {
  std::vector<std::string> plan;
  Frame frame = initial_frame(task);
  const auto crops =
      static_cast<int>(std::count(task.s_req.begin(), task.s_req.end(), ToolId::kCrop));
  std::vector<BBox> windows;
  if (crops == 1) {
    windows = {*task.target_box};
  } else if (crops > 1) {
    windows = multicrop_windows(*task.target_box, task.canonical_image.width(),
                                task.canonical_image.height(), crops, GenConfig{}.shrink_factor);
  }
  std::size_t next_window = 0;
  for (ToolId id : task.s_req) {
    if (id == ToolId::kCrop) {
      const BBox region = frame.from_canonical(windows[next_window++]);
      plan.push_back(crop_call(region));
      frame = frame.after_crop(region);
    } else {
      plan.push_back(call(id));
      frame = frame.after_transform(*transform_for_tool(id));
    }
  }
  if (optional_tool) {
    if (plan.empty()) {
      plan.push_back(call(*optional_tool));
    } else {
      plan.back() += " | " + call(*optional_tool);
    }
  }
  return plan;
}

AgentAction act(const PolicySpec& policy, const TaskSpec& task, const Observation& obs,
                const std::vector<Turn>& history) {
  const std::size_t step = history.size();
  switch (policy.kind) {
    case PolicyKind::kOracle: return act_oracle(policy, task, obs, step);
    case PolicyKind::kTrialAndError: return act_trial(policy, task, obs, step);
    case PolicyKind::kRewardHacker: return act_hacker(policy, task, obs, step);
    case PolicyKind::kClumsy: return act_clumsy(policy, task, obs, history);
    case PolicyKind::kRandom: return act_random(policy, task, obs, step);
  }
  return answer_action(policy, task, obs);
}

Trajectory run_episode(const Environment& env, const PolicySpec& policy,
                       std::shared_ptr<const TaskSpec> task) {
  Episode ep = env.reset(task);
  while (!ep.done()) {
    ep.step(act(policy, *task, ep.observation(), ep.trajectory().turns));
  }
  return ep.trajectory();
}

GroupRollout rollout_group(const Environment& env, std::span<const PolicySpec> mix,
                           std::shared_ptr<const TaskSpec> task, int k, const RewardConfig& cfg) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "rollout_group: K must be >= 2");
  if (mix.empty()) throw Error(ErrorCode::kInvalidArgument, "rollout_group: empty policy mix");
  GroupRollout g;
  for (int i = 0; i < k; ++i) {
    PolicySpec p = mix[static_cast<std::size_t>(i) % mix.size()];
    p.seed = derive_seed(p.seed, static_cast<std::uint64_t>(i));
    g.trajectories.push_back(run_episode(env, p, task));
    g.breakdowns.push_back(score_trajectory(g.trajectories.back(), *task, cfg));
  }
  RewardConfig group_cfg = cfg;
  group_cfg.group_k = k;
  g.r_nec = finalize_group(g.breakdowns, group_cfg);
  g.stats = GroupStats::from_breakdowns(g.breakdowns, k);
  return g;
}

}  // namespace toolvis
