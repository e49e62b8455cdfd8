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

#include "toolvis/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "toolvis/font.hpp"

namespace toolvis {
namespace {

constexpr int kMaxPlacementAttempts = 400;
constexpr int kParagraphPad = 6;
constexpr int kLineGap = 3;  // in glyph pixels
constexpr std::uint64_t kSceneStream = 0x5C3E;
constexpr std::uint64_t kQuestionStream = 2;

std::string format_id(const char* prefix, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s-%06zu", prefix, i);
  return buf;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < text.size() && text[i] != ' ') ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

bool boxes_overlap(const BBox& a, const BBox& b) {
  return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
}

double area_ratio(const BBox& box, int width, int height) {
  return static_cast<double>(box.area()) /
         (static_cast<double>(width) * static_cast<double>(height));
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

}  // namespace

std::string_view level_name(AnnotationLevel level) {
  switch (level) {
    case AnnotationLevel::kWord: return "word";
    case AnnotationLevel::kLine: return "line";
    case AnnotationLevel::kParagraph: return "paragraph";
  }
  return "";
}

std::optional<AnnotationLevel> level_from_name(std::string_view name) {
  for (AnnotationLevel l :
       {AnnotationLevel::kWord, AnnotationLevel::kLine, AnnotationLevel::kParagraph}) {
    if (level_name(l) == name) return l;
  }
  return std::nullopt;
}

const std::vector<std::string>& lexicon() {
  static const std::vector<std::string> kWords = {
      "amber",   "anchor",  "apple",   "arch",    "aspen",   "autumn",  "bamboo",  "basil",
      "beacon",  "birch",   "bison",   "blossom", "bramble", "breeze",  "brook",   "cabin",
      "candle",  "canyon",  "cedar",   "chalk",   "cherry",  "cider",   "clover",  "cobalt",
      "comet",   "copper",  "coral",   "cotton",  "crane",   "crystal", "daisy",   "delta",
      "dune",    "eagle",   "ember",   "fable",   "falcon",  "fern",    "fjord",   "flint",
      "forest",  "fossil",  "garnet",  "ginger",  "glacier", "granite", "harbor",  "hazel",
      "heron",   "honey",   "indigo",  "island",  "ivory",   "jasmine", "juniper", "kettle",
      "lagoon",  "lantern", "lemon",   "lilac",   "linen",   "lotus",   "maple",   "marble",
      "meadow",  "melon",   "mint",    "mosaic",  "nectar",  "nutmeg",  "oasis",   "olive",
      "onyx",    "orchid",  "otter",   "pebble",  "pepper",  "pine",    "plum",    "prairie",
      "quartz",  "quill",   "raven",   "reef",    "river",   "saffron", "sage",    "salmon",
      "sierra",  "silver",  "spruce",  "stone",   "summit",  "thistle", "thunder", "tulip",
      "tundra",  "velvet",  "violet",  "walnut",  "willow",  "winter",  "yarrow",  "zephyr",
      "a",       "an",      "and",     "the",     "of",      "cat",     "bat",     "bee",
  };
  return kWords;
}

SceneLayout layout_scene(std::uint64_t seed, int words, const SceneOptions& options) {
  if (words < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "synth_scene: words must be >= 1, got " + std::to_string(words));
  }
  const int W = options.width;
  const int H = options.height;
  if (W < 16 || H < 16) {
    throw Error(ErrorCode::kInvalidArgument, "synth_scene: canvas must be at least 16x16");
  }
  Rng rng(derive_seed(seed, 0));
  const auto& lex = lexicon();
  const int margin = std::max(2, std::min(W, H) / 64);
  SceneLayout layout;
  layout.seed = seed;
  layout.width = W;
  layout.height = H;
  std::vector<BBox> placed;
  int remaining = words;
  for (int p = 0; remaining > 0; ++p) {
    const bool title = p == 0;
    const int n_lines = title ? 1 : static_cast<int>(rng.uniform_int(1, 3));
    std::vector<std::string> lines;
    for (int l = 0; l < n_lines && remaining > 0; ++l) {
      const int count = std::min<int>(remaining, static_cast<int>(rng.uniform_int(1, 3)));
      std::string line;
      for (int w = 0; w < count; ++w) {
        std::string word = lex[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(lex.size()) - 1))];
        if (title) word[0] = static_cast<char>(word[0] - 'a' + 'A');
        if (!line.empty()) line += ' ';
        line += word;
      }
      remaining -= count;
      lines.push_back(std::move(line));
    }
    int unit_width = 0;
    for (const auto& l : lines) unit_width = std::max(unit_width, text_width(l, 1));
    const int n = static_cast<int>(lines.size());
    const int fit = std::min((W - 2 * margin) / unit_width,
                             (H - 2 * margin) / (n * kGlyphHeight + (n - 1) * kLineGap));
    int scale;
    if (title) {
      scale = std::min(static_cast<int>(rng.uniform_int(6, 10)), fit);
    } else {
      static constexpr double kScaleWeights[] = {0.6, 0.25, 0.15};
      scale = std::min(static_cast<int>(rng.weighted(kScaleWeights)) + 1, fit);
    }
    int bw = unit_width * scale;
    int bh = (n * kGlyphHeight + (n - 1) * kLineGap) * scale;
    auto overflow = [&] {
      throw Error(ErrorCode::kOverflow,
                  "synth_scene: no room for paragraph " + std::to_string(p + 1) + " (" +
                      std::to_string(bw) + "x" + std::to_string(bh) + ") on the " +
                      std::to_string(W) + "x" + std::to_string(H) + " canvas");
    };
    if (scale < 1) overflow();
    // Crowded canvases fall back to smaller glyphs before giving up.
    std::optional<BBox> box;
    for (; scale >= 1 && !box; --scale) {
      bw = unit_width * scale;
      bh = (n * kGlyphHeight + (n - 1) * kLineGap) * scale;
      for (int attempt = 0; attempt < kMaxPlacementAttempts && !box; ++attempt) {
        const int x = static_cast<int>(rng.uniform_int(margin, W - margin - bw));
        const int y = static_cast<int>(rng.uniform_int(margin, H - margin - bh));
        const BBox cand{x, y, x + bw, y + bh};
        const BBox padded{x - kParagraphPad, y - kParagraphPad, x + bw + kParagraphPad,
                          y + bh + kParagraphPad};
        if (std::none_of(placed.begin(), placed.end(),
                         [&](const BBox& b) { return boxes_overlap(b, padded); })) {
          box = cand;
        }
      }
      if (box) break;
    }
    if (!box) {
      scale = 1;
      bw = unit_width;
      bh = n * kGlyphHeight + (n - 1) * kLineGap;
      overflow();
    }
    placed.push_back(*box);
    const Rgb ink{static_cast<std::uint8_t>(rng.uniform_int(0, 80)),
                  static_cast<std::uint8_t>(rng.uniform_int(0, 80)),
                  static_cast<std::uint8_t>(rng.uniform_int(0, 80))};

    std::string para_text;
    for (const auto& l : lines) para_text += (para_text.empty() ? "" : " ") + l;
    layout.annotations.push_back(Annotation{AnnotationLevel::kParagraph, para_text, *box});
    for (int l = 0; l < n; ++l) {
      const int ly = box->y0 + l * (kGlyphHeight + kLineGap) * scale;
      const std::string& text = lines[static_cast<std::size_t>(l)];
      layout.runs.push_back(TextRun{text, box->x0, ly, scale, ink});
      layout.annotations.push_back(
          Annotation{AnnotationLevel::kLine, text,
                     BBox{box->x0, ly, box->x0 + text_width(text, scale), ly + kGlyphHeight * scale}});
      std::size_t i = 0;
      while (i < text.size()) {
        const std::size_t end = std::min(text.find(' ', i), text.size());
        const int wx = box->x0 + static_cast<int>(i) * kGlyphAdvance * scale;
        const std::string word = text.substr(i, end - i);
        layout.annotations.push_back(
            Annotation{AnnotationLevel::kWord, word,
                       BBox{wx, ly, wx + text_width(word, scale), ly + kGlyphHeight * scale}});
        i = end + 1;
      }
    }
  }
  return layout;
}

Raster render_scene(const SceneLayout& layout) {
  const int W = layout.width;
  const int H = layout.height;
  Canvas canvas(W, H);
  Rng noise(derive_seed(layout.seed, 1));
  auto& bytes = canvas.bytes();
  const int dx = std::max(W - 1, 1);
  const int dy = std::max(H - 1, 1);
  std::size_t i = 0;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const std::uint64_t r = noise.next();
      const int base[3] = {170 + 60 * x / dx, 170 + 60 * y / dy, 205};
      for (int c = 0; c < 3; ++c) {
        const int jitter = static_cast<int>((r >> (c * 16)) % 13) - 6;
        bytes[i++] = static_cast<std::uint8_t>(std::clamp(base[c] + jitter, 0, 255));
      }
    }
  }
  for (const TextRun& run : layout.runs) {
    draw_text(canvas, run.x, run.y, run.text, run.scale, run.ink);
  }
  return std::move(canvas).finish();
}

SceneDoc synth_scene(std::uint64_t seed, int words, const SceneOptions& options) {
  SceneLayout layout = layout_scene(seed, words, options);
  return SceneDoc{render_scene(layout), std::move(layout.annotations), Provenance::kSynthetic};
}

std::vector<Annotation> filter_small(std::span<const Annotation> annotations, int width,
                                     int height, std::optional<AnnotationLevel> level,
                                     double threshold, FilterMode mode) {
  if (!(threshold > 0 && threshold <= 1)) {
    throw Error(ErrorCode::kInvalidArgument, "filter_small: threshold must be in (0, 1]");
  }
  std::vector<Annotation> out;
  for (const Annotation& a : annotations) {
    if (level && a.level != *level) continue;
    const double r = area_ratio(a.box, width, height);
    if (mode == FilterMode::kInclusive ? r <= threshold : r < threshold) out.push_back(a);
  }
  return out;
}

std::vector<Annotation> filter_small(const SceneDoc& scene, std::optional<AnnotationLevel> level,
                                     double threshold, FilterMode mode) {
  return filter_small(scene.annotations, scene.image.width(), scene.image.height(), level,
                      threshold, mode);
}

void GenConfig::validate() const {
  double sum = 0;
  for (double p : type_proportions) {
    if (!(p >= 0)) throw Error(ErrorCode::kInvalidArgument, "gen config: negative proportion");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "gen config: type proportions must sum to 1");
  }
  if (!(area_threshold > 0 && area_threshold < 1)) {
    throw Error(ErrorCode::kInvalidArgument, "gen config: area_threshold must be in (0, 1)");
  }
  if (!(shrink_factor > 0 && shrink_factor < 1)) {
    throw Error(ErrorCode::kInvalidArgument, "gen config: shrink_factor must be in (0, 1)");
  }
  if (scene_width < 16 || scene_height < 16 || scene_words < 1 || tasks_per_scene < 1 ||
      multicrop_steps < 2 || multi_tool_orientations < 1 || items_per_scene < 1) {
    throw Error(ErrorCode::kInvalidArgument, "gen config: size parameter out of range");
  }
}

GenConfig GenConfig::from_kv(const KeyValues& kv) {
  kv.require_known({"p_single_tool", "p_multi_tool", "p_multi_crop", "p_error_handling",
                    "p_no_tool", "area_threshold", "shrink_factor", "rng_seed", "scene_width",
                    "scene_height", "scene_words", "tasks_per_scene", "multicrop_steps",
                    "multi_tool_orientations", "items_per_scene"});
  GenConfig c;
  static constexpr const char* kKeys[5] = {"p_single_tool", "p_multi_tool", "p_multi_crop",
                                           "p_error_handling", "p_no_tool"};
  for (int i = 0; i < 5; ++i) {
    c.type_proportions[static_cast<std::size_t>(i)] =
        kv.get_double(kKeys[i], c.type_proportions[static_cast<std::size_t>(i)]);
  }
  c.area_threshold = kv.get_double("area_threshold", c.area_threshold);
  c.shrink_factor = kv.get_double("shrink_factor", c.shrink_factor);
  c.rng_seed = static_cast<std::uint64_t>(kv.get_int("rng_seed", 0));
  c.scene_width = static_cast<int>(kv.get_int("scene_width", c.scene_width));
  c.scene_height = static_cast<int>(kv.get_int("scene_height", c.scene_height));
  c.scene_words = static_cast<int>(kv.get_int("scene_words", c.scene_words));
  c.tasks_per_scene = static_cast<int>(kv.get_int("tasks_per_scene", c.tasks_per_scene));
  c.multicrop_steps = static_cast<int>(kv.get_int("multicrop_steps", c.multicrop_steps));
  c.multi_tool_orientations =
      static_cast<int>(kv.get_int("multi_tool_orientations", c.multi_tool_orientations));
  c.items_per_scene = static_cast<int>(kv.get_int("items_per_scene", c.items_per_scene));
  c.validate();
  return c;
}

TaskType sample_type(Rng& rng, const GenConfig& cfg) {
  return kAllTaskTypes[rng.weighted(cfg.type_proportions)];
}

TaskMeta sample_meta(Rng& rng, const GenConfig& cfg) {
  TaskMeta meta;
  meta.type = sample_type(rng, cfg);
  auto orientation = [&] { return kOrientationTools[static_cast<std::size_t>(rng.uniform_int(0, 4))]; };
  switch (meta.type) {
    case TaskType::kSingleTool:
      meta.s_req = {kMustUseTools[static_cast<std::size_t>(rng.uniform_int(0, 5))]};
      break;
    case TaskType::kMultiTool:
      for (int i = 0; i < cfg.multi_tool_orientations; ++i) meta.s_req.push_back(orientation());
      meta.s_req.push_back(ToolId::kCrop);
      break;
    case TaskType::kMultiCrop:
      meta.s_req.assign(static_cast<std::size_t>(cfg.multicrop_steps), ToolId::kCrop);
      break;
    case TaskType::kErrorHandling:
      meta.s_req = {orientation()};
      break;
    case TaskType::kNoTool:
      break;
  }
  return meta;
}

bool has_positional_cue(std::string_view prompt) {
  std::string lower(prompt);
  for (char& c : lower) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return std::any_of(kBannedPhrases.begin(), kBannedPhrases.end(), [&](std::string_view p) {
    return lower.find(p) != std::string::npos;
  });
}

std::vector<Question> questions_for(std::span<const Annotation> scene, const Annotation& target,
                                    Rng& rng) {
  std::vector<Question> out;
  const std::vector<std::string> words = split_words(target.text);
  auto others = [&](AnnotationLevel level, auto&& pred) {
    return std::any_of(scene.begin(), scene.end(), [&](const Annotation& a) {
      return a.level == level && !(a == target) && pred(a);
    });
  };
  switch (target.level) {
    case AnnotationLevel::kLine: {
      if (words.size() < 2) break;
      const std::string& first = words.front();
      if (others(AnnotationLevel::kLine, [&](const Annotation& a) {
            const auto w = split_words(a.text);
            return !w.empty() && w.front() == first;
          })) {
        break;
      }
      out.push_back(Question{"line", "What does the line beginning with `" + first + "' say?",
                             target.text, target});
      break;
    }
    case AnnotationLevel::kParagraph: {
      if (words.empty()) break;
      const std::string& last = words.back();
      if (others(AnnotationLevel::kParagraph, [&](const Annotation& a) {
            const auto w = split_words(a.text);
            return !w.empty() && w.back() == last;
          })) {
        break;
      }
      std::string letters;
      for (char c : target.text) {
        if (c != ' ' && letters.find(c) == std::string::npos) letters.push_back(c);
      }
      std::sort(letters.begin(), letters.end());
      const char c = letters[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(letters.size()) - 1))];
      const auto count = std::count(target.text.begin(), target.text.end(), c);
      out.push_back(Question{"count",
                             std::string("How many times does the letter `") + c +
                                 "' appear in the paragraph ending with `" + last + "'?",
                             std::to_string(count), target});
      break;
    }
    case AnnotationLevel::kWord: {
      const std::string& w = target.text;
      for (std::size_t len = 2; len < w.size(); ++len) {
        const std::string prefix = w.substr(0, len);
        if (others(AnnotationLevel::kWord, [&](const Annotation& a) {
              return a.text.compare(0, len, prefix) == 0;
            })) {
          continue;
        }
        out.push_back(Question{"word",
                               "Which word in the image starts with the letters `" + prefix +
                                   "'?",
                               w, target});
        break;
      }
      break;
    }
  }
  std::erase_if(out, [](const Question& q) { return has_positional_cue(q.prompt); });
  return out;
}

std::string scripted_fault(Rng& rng, int width, int height) {
  switch (rng.uniform_int(0, 3)) {
    case 0: return "flip-horizontal(axis=1)";
    case 1: return "rotate(angle=90)";
    case 2: return "rotate90(";
    default:
      return "crop(x0=" + std::to_string(width + 10) + ", y0=" + std::to_string(height + 10) +
             ", x1=" + std::to_string(width + 50) + ", y1=" + std::to_string(height + 50) + ")";
  }
}

TaskSpec make_task(const SceneDoc& scene, const TaskMeta& meta, const GenConfig& cfg, Rng& rng,
                   std::string id) {
  const int W = scene.image.width();
  const int H = scene.image.height();
  const bool needs_crop =
      std::find(meta.s_req.begin(), meta.s_req.end(), ToolId::kCrop) != meta.s_req.end();
  std::vector<Annotation> pool;
  if (needs_crop) {
    pool = filter_small(scene, std::nullopt, cfg.area_threshold, FilterMode::kInclusive);
  } else {
    for (const Annotation& a : scene.annotations) {
      if (area_ratio(a.box, W, H) > cfg.area_threshold) pool.push_back(a);
    }
  }
  std::vector<Question> questions;
  for (const Annotation& a : pool) {
    for (Question& q : questions_for(scene.annotations, a, rng)) questions.push_back(std::move(q));
  }
  if (questions.empty()) {
    throw Error(ErrorCode::kNoCandidate,
                "make_task '" + id + "': no annotation qualifies for a " +
                    std::string(task_type_name(meta.type)) + " task");
  }
  Question q = questions[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(questions.size()) - 1))];

  TaskSpec task;
  task.id = std::move(id);
  task.question = q.prompt;
  task.canonical_image = scene.image;
  task.gold_answer = q.answer;
  task.task_type = meta.type;
  task.s_req = meta.s_req;
  if (needs_crop) task.target_box = q.target.box;
  task.max_turns = default_max_turns(meta.s_req.size());
  Raster initial = scene.image;
  for (auto it = meta.s_req.rbegin(); it != meta.s_req.rend(); ++it) {
    if (const auto kind = transform_for_tool(*it)) initial = apply_transform(initial, inverse(*kind));
  }
  task.initial_image = initial;
  if (meta.type == TaskType::kErrorHandling) {
    task.scripted_fault = scripted_fault(rng, initial.width(), initial.height());
  }
  if (meta.type == TaskType::kMultiCrop) {
    multicrop_windows(q.target.box, W, H, static_cast<int>(meta.s_req.size()), cfg.shrink_factor);
  }
  validate_task(task);
  return task;
}

std::vector<BBox> multicrop_windows(const BBox& target, int width, int height, int steps,
                                    double shrink_factor) {
  if (steps < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "multicrop_windows: steps must be >= 2, got " + std::to_string(steps));
  }
  if (!target.valid() || !BBox{0, 0, width, height}.contains(target)) {
    throw Error(ErrorCode::kInvalidArgument,
                "multicrop_windows: target " + to_string(target) + " is not inside the image");
  }
  if (!(shrink_factor > 0 && shrink_factor < 1)) {
    throw Error(ErrorCode::kInvalidArgument, "multicrop_windows: shrink_factor must be in (0, 1)");
  }
  auto infeasible = [&] {
    throw Error(ErrorCode::kInfeasible,
                "multicrop_windows: cannot fit " + std::to_string(steps) +
                    " windows shrinking by " + std::to_string(shrink_factor) + " around " +
                    to_string(target) + " in " + std::to_string(width) + "x" +
                    std::to_string(height));
  };
  const double grow = std::sqrt(1.0 / shrink_factor);
  std::vector<BBox> windows(static_cast<std::size_t>(steps));
  windows.back() = target;
  for (int i = steps - 2; i >= 0; --i) {
    const BBox& next = windows[static_cast<std::size_t>(i) + 1];
    auto need = static_cast<std::int64_t>(std::ceil(static_cast<double>(next.area()) / shrink_factor));
    while (static_cast<double>(next.area()) > shrink_factor * static_cast<double>(need)) ++need;
    if (need > static_cast<std::int64_t>(width) * height) infeasible();
    std::int64_t nw = std::min<std::int64_t>(
        width, std::max<std::int64_t>(next.width() + 1,
                                      static_cast<std::int64_t>(std::ceil(next.width() * grow))));
    std::int64_t nh = std::max<std::int64_t>(next.height(), ceil_div(need, nw));
    if (nh > height) {
      nh = height;
      nw = std::max<std::int64_t>(nw, ceil_div(need, nh));
      if (nw > width) infeasible();
    }
    const int x0 = std::clamp(next.x0 - static_cast<int>((nw - next.width()) / 2), 0,
                              width - static_cast<int>(nw));
    const int y0 = std::clamp(next.y0 - static_cast<int>((nh - next.height()) / 2), 0,
                              height - static_cast<int>(nh));
    windows[static_cast<std::size_t>(i)] =
        BBox{x0, y0, x0 + static_cast<int>(nw), y0 + static_cast<int>(nh)};
  }
  return windows;
}

bool difficulty_filter(const std::vector<bool>& successes) {
  if (successes.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "difficulty_filter: need at least 2 rollouts");
  }
  const auto n = std::count(successes.begin(), successes.end(), true);
  return n >= 1 && n <= static_cast<std::int64_t>(successes.size()) - 1;
}

std::vector<TaskSpec> gen_tasks(const GenConfig& cfg, int n) {
  cfg.validate();
  if (n < 0) throw Error(ErrorCode::kInvalidArgument, "gen_tasks: negative count");
  const SceneOptions opts{cfg.scene_width, cfg.scene_height};
  std::vector<TaskSpec> tasks;
  std::optional<std::pair<std::uint64_t, SceneDoc>> cached;
  auto scene_for = [&](std::uint64_t seed) -> const SceneDoc& {
    if (!cached || cached->first != seed) {
      cached.emplace(seed, synth_scene(seed, cfg.scene_words, opts));
    }
    return cached->second;
  };
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(cfg.rng_seed, static_cast<std::uint64_t>(i)));
    const TaskMeta meta = sample_meta(rng, cfg);
    const auto scene_index = static_cast<std::uint64_t>(i / cfg.tasks_per_scene);
    constexpr int kAttempts = 8;
    for (int attempt = 0;; ++attempt) {
      const std::uint64_t seed =
          attempt == 0 ? derive_seed(cfg.rng_seed ^ kSceneStream, scene_index)
                       : derive_seed(cfg.rng_seed ^ kSceneStream,
                                     (scene_index << 8) + static_cast<std::uint64_t>(attempt) +
                                         (1ULL << 40));
      try {
        tasks.push_back(make_task(scene_for(seed), meta, cfg, rng,
                                  format_id("task", static_cast<std::size_t>(i))));
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNoCandidate || attempt + 1 >= kAttempts) throw;
      }
    }
  }
  return tasks;
}

namespace {

std::vector<Question> bench_questions(const SceneLayout& layout, const GenConfig& cfg) {
  Rng rng(derive_seed(layout.seed, kQuestionStream));
  std::vector<Question> qs;
  for (const Annotation& a : filter_small(layout.annotations, layout.width, layout.height,
                                          std::nullopt, cfg.area_threshold, FilterMode::kStrict)) {
    for (Question& q : questions_for(layout.annotations, a, rng)) qs.push_back(std::move(q));
  }
  rng.shuffle(std::span<Question>(qs));
  if (qs.size() > static_cast<std::size_t>(cfg.items_per_scene)) {
    qs.resize(static_cast<std::size_t>(cfg.items_per_scene));
  }
  return qs;
}

}  // namespace

std::vector<SceneLayout> mvtool_scenes(int n, const GenConfig& cfg) {
  cfg.validate();
  const SceneOptions opts{cfg.scene_width, cfg.scene_height};
  std::vector<SceneLayout> scenes;
  std::size_t have = 0;
  int barren = 0;
  for (std::uint64_t s = 0; have < static_cast<std::size_t>(std::max(n, 0)); ++s) {
    SceneLayout layout = layout_scene(derive_seed(cfg.rng_seed ^ kSceneStream, s),
                                      cfg.scene_words, opts);
    const std::size_t q = bench_questions(layout, cfg).size();
    if (q == 0 && ++barren > 100) {
      throw Error(ErrorCode::kNoCandidate, "mvtool: scenes yield no small annotations");
    }
    have += q;
    scenes.push_back(std::move(layout));
  }
  return scenes;
}

std::vector<BenchItem> gen_mvtool(std::span<const SceneLayout> scenes, int n,
                                  const GenConfig& cfg) {
  cfg.validate();
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "gen_mvtool: n must be >= 1");
  std::vector<BenchItem> items;
  for (std::size_t s = 0; s < scenes.size() && items.size() < static_cast<std::size_t>(n); ++s) {
    for (Question& q : bench_questions(scenes[s], cfg)) {
      if (items.size() == static_cast<std::size_t>(n)) break;
      items.push_back(BenchItem{format_id("mvtool", items.size()), s, std::move(q),
                                TransformKind::kRot90});
    }
  }
  if (items.size() < static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::kNoCandidate, "gen_mvtool: only " + std::to_string(items.size()) +
                                             " questions available, " + std::to_string(n) +
                                             " requested");
  }
  std::vector<TransformKind> deck;
  for (int i = 0; i < n; ++i) deck.push_back(kCorruptions[static_cast<std::size_t>(i) % 5]);
  Rng rng(derive_seed(cfg.rng_seed, 0xDEC));
  rng.shuffle(std::span<TransformKind>(deck));
  for (std::size_t i = 0; i < items.size(); ++i) items[i].transform = deck[i];
  return items;
}

TaskSpec materialize(const BenchItem& item, const Raster& canonical) {
  TaskSpec task;
  task.id = item.id;
  task.question = item.question.prompt;
  task.canonical_image = canonical;
  task.initial_image = apply_transform(canonical, item.transform);
  task.gold_answer = item.question.answer;
  task.task_type = TaskType::kMultiTool;
  task.s_req = {*tool_for_transform(inverse(item.transform)), ToolId::kCrop};
  task.target_box = item.question.target.box;
  task.max_turns = default_max_turns(task.s_req.size());
  validate_task(task);
  return task;
}

std::vector<TaskSpec> gen_orientation_suite(std::span<const BaseItem> base) {
  std::vector<TaskSpec> out;
  for (const BaseItem& b : base) {
    TaskSpec source;
    source.id = b.id + "/source";
    source.question = b.question;
    source.initial_image = b.canonical_image;
    source.canonical_image = b.canonical_image;
    source.gold_answer = b.gold_answer;
    source.task_type = TaskType::kNoTool;
    source.max_turns = default_max_turns(0);
    out.push_back(source);
    for (ToolId tool : kOrientationTools) {
      TaskSpec v = source;
      v.id = b.id + "/" + std::string(tool_name(tool));
      v.task_type = TaskType::kSingleTool;
      v.s_req = {tool};
      v.initial_image = apply_transform(b.canonical_image, inverse(*transform_for_tool(tool)));
      v.max_turns = default_max_turns(1);
      out.push_back(std::move(v));
    }
  }
  return out;
}

BaseItem base_item(const SceneDoc& scene, const GenConfig& cfg, Rng& rng, std::string id) {
  TaskMeta meta;
  meta.type = TaskType::kNoTool;
  TaskSpec t = make_task(scene, meta, cfg, rng, id);
  return BaseItem{std::move(id), t.question, t.gold_answer, scene.image};
}

char diagnostic_option(TransformKind kind) {
  for (std::size_t i = 0; i < kCorruptions.size(); ++i) {
    if (kCorruptions[i] == kind) return static_cast<char>('A' + i);
  }
  throw Error(ErrorCode::kInvalidArgument, "identity is not a diagnostic option");
}

DiagnosticSet gen_diagnostic(std::span<const Raster> images, std::uint64_t seed) {
  if (images.empty()) throw Error(ErrorCode::kInvalidArgument, "gen_diagnostic: no images");
  DiagnosticSet set;
  for (std::size_t i = 0; i < images.size(); ++i) {
    Rng rng(derive_seed(seed, i));
    const TransformKind k = kCorruptions[static_cast<std::size_t>(rng.uniform_int(0, 4))];
    Raster observed = apply_transform(images[i], k);
    if (detect_transform(images[i], observed).size() != 1) {
      set.ambiguous.push_back(i);
      continue;
    }
    char id[32];
    std::snprintf(id, sizeof(id), "diag-%04zu", i);
    set.items.push_back(DiagnosticItem{id, i, k, std::move(observed)});
  }
  return set;
}

}  // namespace toolvis
