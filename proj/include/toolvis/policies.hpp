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

// Scripted agents. They read task metadata where needed; they are test
// fixtures, not solvers.

#ifndef TOOLVIS_POLICIES_HPP_
#define TOOLVIS_POLICIES_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toolvis/episode.hpp"
#include "toolvis/reward.hpp"

namespace toolvis {

enum class PolicyKind { kOracle, kTrialAndError, kRewardHacker, kClumsy, kRandom };

// "oracle", "trial-and-error", "reward-hacker", "clumsy", "random".
std::string_view policy_kind_name(PolicyKind kind);
std::optional<PolicyKind> policy_kind_from_name(std::string_view name);

struct PolicySpec {
  PolicyKind kind = PolicyKind::kOracle;
  std::uint64_t seed = 0;
  // Enhancement appended to the last tool turn (oracle and clumsy).
  std::optional<ToolId> optional_tool;
  // Answer kUnreadable regardless of the view; builds success patterns.
  bool force_wrong_answer = false;
};

inline constexpr std::string_view kUnreadable = "unreadable";

// What a reader sees in a view: the gold answer when the view is upright
// and, for tasks with a target, cropped to a region containing it.
std::string simulated_reading(const TaskSpec& task, const Frame& frame);

// The oracle's programs, one per turn, without the final answer.
std::vector<std::string> oracle_plan(const TaskSpec& task,
                                     std::optional<ToolId> optional_tool = std::nullopt);

AgentAction act(const PolicySpec& policy, const TaskSpec& task, const Observation& obs,
                const std::vector<Turn>& history);

Trajectory run_episode(const Environment& env, const PolicySpec& policy,
                       std::shared_ptr<const TaskSpec> task);

struct GroupRollout {
  std::vector<Trajectory> trajectories;
  std::vector<RewardBreakdown> breakdowns;  // finalized
  GroupStats stats;
  double r_nec = 0;
};

// K episodes of one task, rollout i using mix[i % mix.size()]; scores and
// finalizes the group. Throws kInvalidArgument for K < 2 or an empty mix.
GroupRollout rollout_group(const Environment& env, std::span<const PolicySpec> mix,
                           std::shared_ptr<const TaskSpec> task, int k, const RewardConfig& cfg);

}  // namespace toolvis

#endif  // TOOLVIS_POLICIES_HPP_
