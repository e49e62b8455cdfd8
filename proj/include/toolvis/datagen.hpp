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

#ifndef TOOLVIS_DATAGEN_HPP_
#define TOOLVIS_DATAGEN_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toolvis/episode.hpp"
#include "toolvis/kv.hpp"
#include "toolvis/rng.hpp"

namespace toolvis {

enum class AnnotationLevel { kWord, kLine, kParagraph };

std::string_view level_name(AnnotationLevel level);
std::optional<AnnotationLevel> level_from_name(std::string_view name);

struct Annotation {
  AnnotationLevel level = AnnotationLevel::kWord;
  std::string text;
  BBox box;  // canonical image coordinates

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

enum class Provenance { kSynthetic, kImported };

struct SceneOptions {
  int width = 2048;
  int height = 2048;
};

// One rendered line of text.
struct TextRun {
  std::string text;
  int x = 0;
  int y = 0;
  int scale = 1;
  Rgb ink;

  friend bool operator==(const TextRun&, const TextRun&) = default;
};

// Everything about a synthetic scene except its pixels. Annotations are
// listed paragraph first, then its lines, each line followed by its words.
struct SceneLayout {
  std::uint64_t seed = 0;
  int width = 0;
  int height = 0;
  std::vector<Annotation> annotations;
  std::vector<TextRun> runs;

  friend bool operator==(const SceneLayout&, const SceneLayout&) = default;
};

struct SceneDoc {
  Raster image;
  std::vector<Annotation> annotations;
  Provenance provenance = Provenance::kSynthetic;

  friend bool operator==(const SceneDoc&, const SceneDoc&) = default;
};

// The fixed word list scenes draw from (lowercase ASCII).
const std::vector<std::string>& lexicon();

// A large title paragraph followed by small body paragraphs totalling
// `words` words. Throws kInvalidArgument for words < 1 and kOverflow when
// the text cannot be placed without overlap.
SceneLayout layout_scene(std::uint64_t seed, int words, const SceneOptions& options = {});
Raster render_scene(const SceneLayout& layout);
SceneDoc synth_scene(std::uint64_t seed, int words, const SceneOptions& options = {});

// Reads one JSON record per line:
//   {"image_path": "...", "annotations": [{"level": "word", "text": "...",
//     "vertices": [[x, y], ...]}, ...]}
// Relative image paths resolve against the file's directory. Throws
// kCorruptRecord with the line number.
std::vector<SceneDoc> import_scenes(const std::filesystem::path& jsonl);

// Inclusive keeps area ratios <= threshold, strict keeps < threshold.
enum class FilterMode { kInclusive, kStrict };

// Annotations (optionally of one level) whose box covers a small fraction of
// the image. Order is preserved. Throws kInvalidArgument unless
// 0 < threshold <= 1.
std::vector<Annotation> filter_small(std::span<const Annotation> annotations, int width,
                                     int height, std::optional<AnnotationLevel> level,
                                     double threshold, FilterMode mode);
std::vector<Annotation> filter_small(const SceneDoc& scene, std::optional<AnnotationLevel> level,
                                     double threshold, FilterMode mode);

struct GenConfig {
  // single-tool, multi-tool, multi-crop, error-handling, no-tool.
  std::array<double, 5> type_proportions = {0.3, 0.2, 0.2, 0.1, 0.2};
  double area_threshold = 1e-4;
  double shrink_factor = 0.5;
  std::uint64_t rng_seed = 0;
  int scene_width = 2048;
  int scene_height = 2048;
  int scene_words = 48;
  int tasks_per_scene = 4;
  int multicrop_steps = 2;
  // Orientation tools placed before the crop in multi-tool tasks.
  int multi_tool_orientations = 1;
  // Question cap per scene for benchmark generation.
  int items_per_scene = 8;

  // Throws kInvalidArgument.
  void validate() const;
  static GenConfig from_kv(const KeyValues& kv);
};

TaskType sample_type(Rng& rng, const GenConfig& cfg);

struct TaskMeta {
  TaskType type = TaskType::kNoTool;
  std::vector<ToolId> s_req;
};

TaskMeta sample_meta(Rng& rng, const GenConfig& cfg);

// A templated question about one annotation.
struct Question {
  std::string template_name;  // "line", "count" or "word"
  std::string prompt;
  std::string answer;
  Annotation target;

  friend bool operator==(const Question&, const Question&) = default;
};

inline constexpr std::array<std::string_view, 6> kBannedPhrases = {
    "left", "right", "top", "bottom", "corner", "coordinates"};

bool has_positional_cue(std::string_view prompt);

// Questions about `target` that identify it uniquely within the scene and
// pass the positional-cue audit.
std::vector<Question> questions_for(std::span<const Annotation> scene, const Annotation& target,
                                    Rng& rng);

// Scripted first step of an error-handling task; always fails.
std::string scripted_fault(Rng& rng, int width, int height);

// Throws kNoCandidate when no annotation fits the task type and
// kInfeasible when a multi-crop chain cannot be built.
TaskSpec make_task(const SceneDoc& scene, const TaskMeta& meta, const GenConfig& cfg, Rng& rng,
                   std::string id);

// Nested windows w_1 > ... > w_n with w_n = target and each area at most
// shrink_factor of its predecessor. Throws kInvalidArgument for steps < 2 or
// an invalid target and kInfeasible when the image is too small.
std::vector<BBox> multicrop_windows(const BBox& target, int width, int height, int steps,
                                    double shrink_factor);

// Keep iff 1 <= successes <= K - 1. Throws kInvalidArgument for K < 2.
bool difficulty_filter(const std::vector<bool>& successes);

// Mixed-type task set, deterministic in cfg.rng_seed.
std::vector<TaskSpec> gen_tasks(const GenConfig& cfg, int n);

struct BenchItem {
  std::string id;
  std::size_t scene = 0;  // index into the scene list
  Question question;
  TransformKind transform = TransformKind::kRot90;  // applied to the canonical image

  friend bool operator==(const BenchItem&, const BenchItem&) = default;
};

// Scene layouts sufficient for `n` benchmark items.
std::vector<SceneLayout> mvtool_scenes(int n, const GenConfig& cfg);

// Small-annotation filtering (strict), templated questions, then one of the
// five transforms per item from a balanced shuffled deck. Items keep scene
// indices; pixels are produced by materialize(). Throws kNoCandidate when
// fewer than n questions exist.
std::vector<BenchItem> gen_mvtool(std::span<const SceneLayout> scenes, int n,
                                  const GenConfig& cfg);

TaskSpec materialize(const BenchItem& item, const Raster& canonical);

struct BaseItem {
  std::string id;
  std::string question;
  std::string gold_answer;
  Raster canonical_image;
};

// Source (no-tool) plus one single-tool variant per orientation tool.
std::vector<TaskSpec> gen_orientation_suite(std::span<const BaseItem> base);

// A no-tool question about a large line of a scene; kNoCandidate if none.
BaseItem base_item(const SceneDoc& scene, const GenConfig& cfg, Rng& rng, std::string id);

inline constexpr std::string_view kDiagnosticQuestion =
    "Which transformation was applied to this image? Options: (A) rot90, (B) rot180, "
    "(C) rot270, (D) hflip, (E) vflip";

struct DiagnosticItem {
  std::string id;
  std::size_t image_index = 0;
  TransformKind transform = TransformKind::kRot90;
  Raster observed;
};

struct DiagnosticSet {
  std::vector<DiagnosticItem> items;
  // Images whose transform could not be told apart from another option.
  std::vector<std::size_t> ambiguous;
};

// One item per image, transforms drawn independently and uniformly. Images
// whose transform is ambiguous are listed and get no item.
DiagnosticSet gen_diagnostic(std::span<const Raster> images, std::uint64_t seed);

// Letter of the option for a corruption kind ('A'..'E').
char diagnostic_option(TransformKind kind);

}  // namespace toolvis

#endif  // TOOLVIS_DATAGEN_HPP_
