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

// JSONL persistence. Every record carries a "schema" field:
//
//   toolvis.task/1        TaskSpec (dataset and benchmark manifests)
//   toolvis.trajectory/1  Trajectory plus rollout bookkeeping
//   toolvis.reward/1      RewardBreakdown of one trajectory
//   toolvis.sft/1         TrainingExample
//   toolvis.diagnostic/1  five-way orientation question
//
// Images live next to the JSONL file as images/<sha256>.ppm and are
// verified against their checksum on load.

#ifndef TOOLVIS_STORE_HPP_
#define TOOLVIS_STORE_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "toolvis/datagen.hpp"
#include "toolvis/episode.hpp"
#include "toolvis/reward.hpp"

namespace toolvis {

using Json = nlohmann::json;

inline constexpr std::string_view kTaskSchema = "toolvis.task/1";
inline constexpr std::string_view kTrajectorySchema = "toolvis.trajectory/1";
inline constexpr std::string_view kRewardSchema = "toolvis.reward/1";
inline constexpr std::string_view kSftSchema = "toolvis.sft/1";
inline constexpr std::string_view kDiagnosticSchema = "toolvis.diagnostic/1";

std::string sha256_hex(std::string_view bytes);

// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

struct ImageRef {
  std::string path;  // relative to the store root
  std::string sha256;

  friend bool operator==(const ImageRef&, const ImageRef&) = default;
};

// Content-addressed PPM files under <root>/images.
class ImageStore {
 public:
  explicit ImageStore(std::filesystem::path root) : root_(std::move(root)) {}

  ImageRef put(const Raster& img);
  // Throws kChecksumMismatch when the file content does not hash to the
  // recorded digest, kIo when it is missing.
  Raster get(const ImageRef& ref) const;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  mutable std::map<std::string, Raster> cache_;
};

Json image_ref_to_json(const ImageRef& ref);
ImageRef image_ref_from_json(const Json& j);

Json task_to_json(const TaskSpec& task, ImageStore& images);
TaskSpec task_from_json(const Json& j, const ImageStore& images);

Json trajectory_to_json(const Trajectory& traj, ImageStore& images);
Trajectory trajectory_from_json(const Json& j, const ImageStore& images);

Json reward_to_json(const RewardBreakdown& b);
RewardBreakdown reward_from_json(const Json& j);

enum class SegmentRole { kUser, kAssistant, kToolReturn };

std::string_view segment_role_name(SegmentRole role);
std::optional<SegmentRole> segment_role_from_name(std::string_view name);

// The mask follows from the role: 1 for assistant text, 0 otherwise.
class TrainingSegment {
 public:
  TrainingSegment(SegmentRole role, std::string text) : role_(role), text_(std::move(text)) {}

  SegmentRole role() const { return role_; }
  const std::string& text() const { return text_; }
  int mask() const { return role_ == SegmentRole::kAssistant ? 1 : 0; }

  friend bool operator==(const TrainingSegment&, const TrainingSegment&) = default;

 private:
  SegmentRole role_;
  std::string text_;
};

struct TrainingExample {
  std::string task_id;
  std::vector<TrainingSegment> segments;
  std::optional<std::string> final_answer;

  friend bool operator==(const TrainingExample&, const TrainingExample&) = default;
};

// User prompt, then each turn's assistant text followed by its feedback as a
// tool return (answer turns get none). Throws kNotTerminated.
TrainingExample to_training_example(const Trajectory& traj, const TaskSpec& task,
                                    const ToolRegistry& registry);

// Share of characters that carry mask 1.
double masked_fraction(const TrainingExample& ex);

Json training_example_to_json(const TrainingExample& ex);
// Throws kCorruptRecord for a mask that contradicts the role.
TrainingExample training_example_from_json(const Json& j);

// One compact JSON document per line, keys sorted.
std::string to_jsonl(const std::vector<Json>& records);
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& records);
// Throws kCorruptRecord naming the 1-based line of the first bad record.
std::vector<Json> read_jsonl(const std::filesystem::path& path);

// Rollout bookkeeping stored alongside a trajectory.
struct TrajectoryRecord {
  std::string group;  // rollouts of one task share a group
  int rollout = 0;
  std::string policy;
  Trajectory trajectory;

  friend bool operator==(const TrajectoryRecord&, const TrajectoryRecord&) = default;
};

struct RewardRecord {
  std::string task_id;
  std::string group;
  int rollout = 0;
  bool group_finalized = false;
  RewardBreakdown breakdown;

  friend bool operator==(const RewardRecord&, const RewardRecord&) = default;
};

// File-level helpers; images go under the file's directory. Record-level
// failures are reported as kCorruptRecord with the line number, except
// checksum failures which keep kChecksumMismatch.
void write_tasks(const std::filesystem::path& path, const std::vector<TaskSpec>& tasks);
std::vector<TaskSpec> read_tasks(const std::filesystem::path& path);

void write_trajectories(const std::filesystem::path& path,
                        const std::vector<TrajectoryRecord>& records);
std::vector<TrajectoryRecord> read_trajectories(const std::filesystem::path& path);

void write_rewards(const std::filesystem::path& path, const std::vector<RewardRecord>& records);
std::vector<RewardRecord> read_rewards(const std::filesystem::path& path);

void write_training_examples(const std::filesystem::path& path,
                             const std::vector<TrainingExample>& examples);
std::vector<TrainingExample> read_training_examples(const std::filesystem::path& path);

}  // namespace toolvis

#endif  // TOOLVIS_STORE_HPP_
