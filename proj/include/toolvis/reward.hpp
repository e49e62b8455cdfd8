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

// Dense trajectory reward:
//
//   total = (r_acc + w_fmt * r_fmt)
//         + beta1 * (w_must * (must_use_total + traj_match)
//                    + w_sugg * (nec_bonus + opt_bonus))
//         - beta2 * (turn_limit + poor_reasoning + inappropriate_tool)
//
// Scoring is two-phase: score_trajectory() per rollout, then
// finalize_group() once all group_k rollouts of a task are scored.

#ifndef TOOLVIS_REWARD_HPP_
#define TOOLVIS_REWARD_HPP_

#include <span>
#include <string>
#include <vector>

#include "toolvis/episode.hpp"
#include "toolvis/kv.hpp"

namespace toolvis {

struct RewardConfig {
  double beta1 = 1.0;
  double beta2 = 0.5;
  double w_fmt = 0.1;
  double w_must = 1.0;
  double w_sugg = 0.2;
  double traj_match_bonus = 0.5;
  double optional_tool_bonus = 0.1;
  double iou_floor = 0.1;
  int group_k = 8;

  // Throws kInvalidArgument.
  void validate() const;
  // Unknown keys are rejected; missing keys keep their defaults.
  static RewardConfig from_kv(const KeyValues& kv);

  friend bool operator==(const RewardConfig&, const RewardConfig&) = default;
};

struct LedgerEntry {
  std::string tool;
  double amount = 0;
  int turn = 0;

  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

struct Penalties {
  int turn_limit = 0;
  int poor_reasoning = 0;
  int inappropriate_tool = 0;

  int sum() const { return turn_limit + poor_reasoning + inappropriate_tool; }
  friend bool operator==(const Penalties&, const Penalties&) = default;
};

struct RewardBreakdown {
  int r_acc = 0;
  int r_fmt = 0;
  double must_use_total = 0;
  std::vector<LedgerEntry> ledger;
  double traj_match = 0;  // 0 or traj_match_bonus
  double nec_bonus = 0;
  double opt_bonus = 0;   // 0 or optional_tool_bonus
  Penalties penalties;
  double total = 0;
  // Inputs to group finalization and diagnostics.
  bool uses_optional = false;
  double best_iou = 0;

  friend bool operator==(const RewardBreakdown&, const RewardBreakdown&) = default;
};

// The closed-form total of a breakdown's parts.
double combine(const RewardBreakdown& b, const RewardConfig& cfg);

struct OutcomeReward {
  int r_acc = 0;
  int r_fmt = 0;
};

// Throws Error(kNotTerminated).
OutcomeReward outcome_reward(const Trajectory& traj, const TaskSpec& task);

struct MustUseResult {
  double total = 0;
  std::vector<LedgerEntry> ledger;
  double best_iou = 0;  // canonical-coordinate IoU of the best crop, 0 if none
};

// Throws Error(kNoRequirement) when s_req is empty.
MustUseResult must_use_reward(const Trajectory& traj, const TaskSpec& task);

// Successfully executed orientation and crop calls equal s_req, in order, and
// no turn failed. Enhancement calls are not part of the comparison.
bool traj_match(const Trajectory& traj, const TaskSpec& task);

// At least one successfully executed enhancement call.
bool uses_optional_tool(const Trajectory& traj, const TaskSpec& task);
double optional_bonus(const Trajectory& traj, const TaskSpec& task, const RewardConfig& cfg);

// Throws Error(kNotTerminated).
Penalties penalties(const Trajectory& traj, const TaskSpec& task, const RewardConfig& cfg);

// Per-task rollout group, split into rollouts that used an optional tool
// (tool group) and those that did not.
struct GroupStats {
  int group_k = 8;
  std::vector<int> r_acc;
  std::vector<bool> uses_optional;

  static GroupStats from_breakdowns(std::span<const RewardBreakdown> group, int group_k);

  int tool_size() const;
  int notool_size() const;
  int tool_successes() const;
  int notool_successes() const;
};

// Throws Error(kIncompleteGroup) unless exactly group_k rollouts are present.
double necessity_reward(const GroupStats& group);

// Phase one: every term except nec_bonus.
RewardBreakdown score_trajectory(const Trajectory& traj, const TaskSpec& task,
                                 const RewardConfig& cfg);

// Phase two: computes r_nec and credits it to the successful tool-group
// rollouts; totals are recomputed. Returns r_nec.
double finalize_group(std::span<RewardBreakdown> group, const RewardConfig& cfg);

// Both phases for one trajectory given its group's r_nec.
RewardBreakdown total_reward(const Trajectory& traj, const TaskSpec& task, double group_r_nec,
                             const RewardConfig& cfg);

}  // namespace toolvis

#endif  // TOOLVIS_REWARD_HPP_
