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

#include "toolvis/reward.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace toolvis {
namespace {

// Every successfully executed call with the turn it ran in.
void for_each_success(const Trajectory& traj,
                      const std::function<void(int, const AppliedCall&)>& fn) {
  for (std::size_t t = 0; t < traj.turns.size(); ++t) {
    const auto& outcome = traj.turns[t].outcome;
    if (!outcome || !outcome->ok()) continue;
    for (const AppliedCall& call : outcome->success().applied) fn(static_cast<int>(t), call);
  }
}

bool in_category(const std::string& name, ToolCategory cat) {
  const auto id = tool_from_name(name);
  return id && category(*id) == cat;
}

void require_terminated(const Trajectory& traj) {
  if (!traj.terminated()) {
    throw Error(ErrorCode::kNotTerminated,
                "trajectory for task '" + traj.task_id + "' has not terminated");
  }
}

void check_non_negative(double v, const char* name) {
  if (!(v >= 0)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("reward config: ") + name + " must be >= 0");
  }
}

}  // namespace

void RewardConfig::validate() const {
  check_non_negative(beta1, "beta1");
  check_non_negative(beta2, "beta2");
  check_non_negative(w_fmt, "w_fmt");
  check_non_negative(w_must, "w_must");
  check_non_negative(w_sugg, "w_sugg");
  check_non_negative(traj_match_bonus, "traj_match_bonus");
  check_non_negative(optional_tool_bonus, "optional_tool_bonus");
  if (!(iou_floor > 0 && iou_floor < 1)) {
    throw Error(ErrorCode::kInvalidArgument, "reward config: iou_floor must be in (0, 1)");
  }
  if (group_k < 2) {
    throw Error(ErrorCode::kInvalidArgument, "reward config: group_k must be >= 2");
  }
}

RewardConfig RewardConfig::from_kv(const KeyValues& kv) {
  kv.require_known({"beta1", "beta2", "w_fmt", "w_must", "w_sugg", "traj_match_bonus",
                    "optional_tool_bonus", "iou_floor", "group_k"});
  RewardConfig c;
  c.beta1 = kv.get_double("beta1", c.beta1);
  c.beta2 = kv.get_double("beta2", c.beta2);
  c.w_fmt = kv.get_double("w_fmt", c.w_fmt);
  c.w_must = kv.get_double("w_must", c.w_must);
  c.w_sugg = kv.get_double("w_sugg", c.w_sugg);
  c.traj_match_bonus = kv.get_double("traj_match_bonus", c.traj_match_bonus);
  c.optional_tool_bonus = kv.get_double("optional_tool_bonus", c.optional_tool_bonus);
  c.iou_floor = kv.get_double("iou_floor", c.iou_floor);
  c.group_k = static_cast<int>(kv.get_int("group_k", c.group_k));
  c.validate();
  return c;
}

double combine(const RewardBreakdown& b, const RewardConfig& cfg) {
  return (b.r_acc + cfg.w_fmt * b.r_fmt) +
         cfg.beta1 * (cfg.w_must * (b.must_use_total + b.traj_match) +
                      cfg.w_sugg * (b.nec_bonus + b.opt_bonus)) -
         cfg.beta2 * b.penalties.sum();
}

OutcomeReward outcome_reward(const Trajectory& traj, const TaskSpec& task) {
  require_terminated(traj);
  OutcomeReward r;
  r.r_acc = traj.final_answer && check_answer(*traj.final_answer, task.gold_answer) ? 1 : 0;
  r.r_fmt = format_ok(traj) ? 1 : 0;
  return r;
}

MustUseResult must_use_reward(const Trajectory& traj, const TaskSpec& task) {
  if (task.s_req.empty()) {
    throw Error(ErrorCode::kNoRequirement, "task '" + task.id + "' has no required tools");
  }
  const double n = static_cast<double>(task.s_req.size());
  std::map<ToolId, int> pending;
  for (ToolId id : task.s_req) ++pending[id];
  const int crop_count = pending.count(ToolId::kCrop) ? pending[ToolId::kCrop] : 0;

  MustUseResult res;
  Frame frame = initial_frame(task);
  for_each_success(traj, [&](int turn, const AppliedCall& call) {
    const auto id = tool_from_name(call.tool);
    if (id == ToolId::kCrop && crop_count > 0 && call.region && task.target_box) {
      const double v = iou(frame.to_canonical(*call.region), *task.target_box);
      if (v > res.best_iou) {
        const double amount = (crop_count / n) * (v - res.best_iou);
        res.ledger.push_back(LedgerEntry{call.tool, amount, turn});
        res.total += amount;
        res.best_iou = v;
      }
    } else if (id && *id != ToolId::kCrop) {
      const auto it = pending.find(*id);
      if (it != pending.end() && it->second > 0) {
        --it->second;
        res.ledger.push_back(LedgerEntry{call.tool, 1.0 / n, turn});
        res.total += 1.0 / n;
      }
    }
    frame = advance_frame(frame, {call});
  });
  return res;
}

bool traj_match(const Trajectory& traj, const TaskSpec& task) {
  if (task.s_req.empty()) return false;
  for (const Turn& t : traj.turns) {
    if (t.outcome && !t.outcome->ok()) return false;
  }
  std::vector<std::string> executed;
  for_each_success(traj, [&](int, const AppliedCall& call) {
    if (!in_category(call.tool, ToolCategory::kEnhancement)) executed.push_back(call.tool);
  });
  if (executed.size() != task.s_req.size()) return false;
  for (std::size_t i = 0; i < executed.size(); ++i) {
    if (executed[i] != tool_name(task.s_req[i])) return false;
  }
  return true;
}

bool uses_optional_tool(const Trajectory& traj, const TaskSpec& task) {
  bool used = false;
  for_each_success(traj, [&](int, const AppliedCall& call) {
    const auto id = tool_from_name(call.tool);
    if (id && category(*id) == ToolCategory::kEnhancement &&
        std::find(task.s_req.begin(), task.s_req.end(), *id) == task.s_req.end()) {
      used = true;
    }
  });
  return used;
}

double optional_bonus(const Trajectory& traj, const TaskSpec& task, const RewardConfig& cfg) {
  return outcome_reward(traj, task).r_acc == 1 && uses_optional_tool(traj, task)
             ? cfg.optional_tool_bonus
             : 0.0;
}

Penalties penalties(const Trajectory& traj, const TaskSpec& task, const RewardConfig& cfg) {
  const OutcomeReward outcome = outcome_reward(traj, task);
  Penalties p;
  p.turn_limit = traj.code_turns() > static_cast<int>(task.s_req.size()) + 1 ? 1 : 0;
  const bool crop_required =
      std::find(task.s_req.begin(), task.s_req.end(), ToolId::kCrop) != task.s_req.end();
  if (outcome.r_acc == 1 && crop_required &&
      must_use_reward(traj, task).best_iou < cfg.iou_floor) {
    p.poor_reasoning = 1;
  }
  if (task.s_req.empty()) {
    for_each_success(traj, [&](int, const AppliedCall& call) {
      if (in_category(call.tool, ToolCategory::kOrientation)) p.inappropriate_tool = 1;
    });
  }
  return p;
}

GroupStats GroupStats::from_breakdowns(std::span<const RewardBreakdown> group, int group_k) {
  GroupStats g;
  g.group_k = group_k;
  for (const RewardBreakdown& b : group) {
    g.r_acc.push_back(b.r_acc);
    g.uses_optional.push_back(b.uses_optional);
  }
  return g;
}

int GroupStats::tool_size() const {
  return static_cast<int>(std::count(uses_optional.begin(), uses_optional.end(), true));
}

int GroupStats::notool_size() const { return static_cast<int>(uses_optional.size()) - tool_size(); }

int GroupStats::tool_successes() const {
  int n = 0;
  for (std::size_t i = 0; i < r_acc.size() && i < uses_optional.size(); ++i) {
    n += uses_optional[i] ? r_acc[i] : 0;
  }
  return n;
}

int GroupStats::notool_successes() const {
  int n = 0;
  for (std::size_t i = 0; i < r_acc.size() && i < uses_optional.size(); ++i) {
    n += uses_optional[i] ? 0 : r_acc[i];
  }
  return n;
}

double necessity_reward(const GroupStats& group) {
  const auto k = static_cast<std::size_t>(group.group_k);
  if (group.r_acc.size() != k || group.uses_optional.size() != k) {
    throw Error(ErrorCode::kIncompleteGroup,
                "group has " + std::to_string(group.r_acc.size()) + " scored rollouts, expected " +
                    std::to_string(group.group_k));
  }
  const int nt = group.tool_size();
  const int nn = group.notool_size();
  if (nt == 0 || nn == 0) return 0.0;
  const double tool_rate = static_cast<double>(group.tool_successes()) / nt;
  const double notool_rate = static_cast<double>(group.notool_successes()) / nn;
  if (!(tool_rate > notool_rate) || group.notool_successes() > 1) return 0.0;
  return std::max(0.0, tool_rate - notool_rate);
}

RewardBreakdown score_trajectory(const Trajectory& traj, const TaskSpec& task,
                                 const RewardConfig& cfg) {
  RewardBreakdown b;
  const OutcomeReward outcome = outcome_reward(traj, task);
  b.r_acc = outcome.r_acc;
  b.r_fmt = outcome.r_fmt;
  if (!task.s_req.empty()) {
    MustUseResult mu = must_use_reward(traj, task);
    b.must_use_total = mu.total;
    b.ledger = std::move(mu.ledger);
    b.best_iou = mu.best_iou;
    b.traj_match = traj_match(traj, task) ? cfg.traj_match_bonus : 0.0;
  }
  b.uses_optional = uses_optional_tool(traj, task);
  b.opt_bonus = b.uses_optional && b.r_acc == 1 ? cfg.optional_tool_bonus : 0.0;
  b.penalties = penalties(traj, task, cfg);
  b.total = combine(b, cfg);
  return b;
}

double finalize_group(std::span<RewardBreakdown> group, const RewardConfig& cfg) {
  const double r_nec = necessity_reward(
      GroupStats::from_breakdowns(std::span<const RewardBreakdown>(group), cfg.group_k));
  for (RewardBreakdown& b : group) {
    b.nec_bonus = b.uses_optional && b.r_acc == 1 ? r_nec : 0.0;
    b.total = combine(b, cfg);
  }
  return r_nec;
}

RewardBreakdown total_reward(const Trajectory& traj, const TaskSpec& task, double group_r_nec,
                             const RewardConfig& cfg) {
  RewardBreakdown b = score_trajectory(traj, task, cfg);
  b.nec_bonus = b.uses_optional && b.r_acc == 1 ? group_r_nec : 0.0;
  b.total = combine(b, cfg);
  return b;
}

}  // namespace toolvis
