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

#include <cmath>
#include <fstream>

#include "toolvis/datagen.hpp"
#include "toolvis/ppm.hpp"
#include "toolvis/verify.hpp"

namespace toolvis {
namespace {

namespace fs = std::filesystem;

const SceneOptions kSmall{384, 384};

TEST(SceneTest, WordCountBoundsAndDeterminism) {
  const SceneDoc a = synth_scene(1, 10);
  int words = 0;
  for (const Annotation& ann : a.annotations) {
    words += ann.level == AnnotationLevel::kWord;
    EXPECT_TRUE(ann.box.valid());
    EXPECT_TRUE(a.image.bounds().contains(ann.box)) << to_string(ann.box);
    EXPECT_FALSE(ann.text.empty());
  }
  EXPECT_EQ(words, 10);
  EXPECT_EQ(a.image.width(), 2048);
  EXPECT_EQ(synth_scene(1, 10), a);
  EXPECT_FALSE(synth_scene(2, 10) == a);
  try {
    synth_scene(1, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
  try {
    synth_scene(1, 400, SceneOptions{64, 64});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOverflow);
  }
}

TEST(SceneTest, NestingAndTextAgree) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SceneLayout layout = layout_scene(seed, 20, kSmall);
    const Annotation* para = nullptr;
    const Annotation* line = nullptr;
    for (const Annotation& a : layout.annotations) {
      switch (a.level) {
        case AnnotationLevel::kParagraph: para = &a; break;
        case AnnotationLevel::kLine:
          ASSERT_NE(para, nullptr);
          EXPECT_TRUE(para->box.contains(a.box));
          EXPECT_NE(para->text.find(a.text), std::string::npos);
          line = &a;
          break;
        case AnnotationLevel::kWord:
          ASSERT_NE(line, nullptr);
          EXPECT_TRUE(line->box.contains(a.box));
          EXPECT_NE(line->text.find(a.text), std::string::npos);
          break;
      }
    }
    EXPECT_EQ(render_scene(layout), synth_scene(seed, 20, kSmall).image);
  }
}

TEST(SceneTest, LexiconPassesPositionalAudit) {
  EXPECT_GE(lexicon().size(), 100u);
  for (const std::string& w : lexicon()) {
    for (std::string_view banned : kBannedPhrases) {
      EXPECT_EQ(w.find(banned), std::string::npos) << w;
    }
    for (char c : w) EXPECT_TRUE(c >= 'a' && c <= 'z') << w;
  }
}

TEST(FilterTest, Examples) {
  const std::vector<Annotation> anns = {
      {AnnotationLevel::kWord, "tiny", BBox{0, 0, 10, 10}},
      {AnnotationLevel::kWord, "huge", BBox{0, 0, 300, 300}},
  };
  auto texts = [](const std::vector<Annotation>& v) {
    std::vector<std::string> out;
    for (const auto& a : v) out.push_back(a.text);
    return out;
  };
  EXPECT_EQ(texts(filter_small(anns, 2048, 2048, std::nullopt, 1e-4, FilterMode::kStrict)),
            std::vector<std::string>{"tiny"});
  EXPECT_EQ(filter_small(anns, 2048, 2048, std::nullopt, 1.0, FilterMode::kInclusive).size(), 2u);
  // 100 / 1e6 sits exactly on the threshold.
  const std::vector<Annotation> edge = {{AnnotationLevel::kWord, "edge", BBox{0, 0, 10, 10}}};
  EXPECT_EQ(filter_small(edge, 1000, 1000, std::nullopt, 1e-4, FilterMode::kInclusive).size(), 1u);
  EXPECT_EQ(filter_small(edge, 1000, 1000, std::nullopt, 1e-4, FilterMode::kStrict).size(), 0u);
  EXPECT_THROW(filter_small(anns, 10, 10, std::nullopt, 0.0, FilterMode::kStrict), Error);
  EXPECT_TRUE(filter_small(anns, 2048, 2048, AnnotationLevel::kLine, 1.0, FilterMode::kInclusive)
                  .empty());
}

TEST(GenConfigTest, Validation) {
  GenConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.type_proportions = {0.5, 0.5, 0.5, 0, 0};
  EXPECT_THROW(cfg.validate(), Error);
  cfg = GenConfig{};
  cfg.area_threshold = 0;
  EXPECT_THROW(cfg.validate(), Error);
  const GenConfig parsed = GenConfig::from_kv(KeyValues::from_arg("p_no_tool=0.4,p_single_tool=0.1"));
  EXPECT_DOUBLE_EQ(parsed.type_proportions[0], 0.1);
  EXPECT_DOUBLE_EQ(parsed.type_proportions[4], 0.4);
  EXPECT_THROW(GenConfig::from_kv(KeyValues::from_arg("p_bogus=1")), Error);
}

TEST(GenConfigTest, TypeFrequenciesMatchProportions) {
  const GenConfig cfg;
  Rng rng(99);
  std::array<int, 5> counts{};
  const int n = 20000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(sample_type(rng, cfg))];
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(counts[i] / static_cast<double>(n), cfg.type_proportions[i], 0.02);
  }
}

TEST(MakeTaskTest, OrientationConventions) {
  const GenConfig cfg = compact_gen_config(4);
  const SceneDoc scene = synth_scene(4, cfg.scene_words, SceneOptions{cfg.scene_width, cfg.scene_height});
  Rng rng(1);
  const TaskSpec r180 = make_task(scene, TaskMeta{TaskType::kSingleTool, {ToolId::kRotate180}}, cfg, rng, "a");
  EXPECT_EQ(r180.initial_image, apply_transform(scene.image, TransformKind::kRot180));
  const TaskSpec r90 = make_task(scene, TaskMeta{TaskType::kSingleTool, {ToolId::kRotate90}}, cfg, rng, "b");
  EXPECT_EQ(r90.initial_image, apply_transform(scene.image, TransformKind::kRot270));
  const TaskSpec none = make_task(scene, TaskMeta{TaskType::kNoTool, {}}, cfg, rng, "c");
  EXPECT_EQ(none.initial_image, scene.image);
  EXPECT_TRUE(none.s_req.empty());
  const TaskSpec err = make_task(
      scene, TaskMeta{TaskType::kErrorHandling, {ToolId::kFlipVertical}}, cfg, rng, "d");
  ASSERT_TRUE(err.scripted_fault.has_value());
  const TaskSpec crop = make_task(scene, TaskMeta{TaskType::kSingleTool, {ToolId::kCrop}}, cfg, rng, "e");
  ASSERT_TRUE(crop.target_box.has_value());
  EXPECT_LE(static_cast<double>(crop.target_box->area()) / (384.0 * 384.0), cfg.area_threshold);

  GenConfig strict = cfg;
  strict.area_threshold = 1e-9;
  try {
    make_task(scene, TaskMeta{TaskType::kSingleTool, {ToolId::kCrop}}, strict, rng, "f");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoCandidate);
  }
}

TEST(MakeTaskTest, GeneratedTasksSatisfyInvariants) {
  const std::vector<TaskSpec> tasks = gen_tasks(compact_gen_config(8), 60);
  ASSERT_EQ(tasks.size(), 60u);
  std::set<TaskType> seen;
  for (const TaskSpec& t : tasks) {
    EXPECT_NO_THROW(validate_task(t)) << t.id;
    Raster img = t.initial_image;
    for (ToolId id : t.s_req) {
      if (const auto k = transform_for_tool(id)) img = apply_transform(img, *k);
    }
    EXPECT_EQ(img, t.canonical_image) << t.id;
    EXPECT_FALSE(has_positional_cue(t.question));
    seen.insert(t.task_type);
  }
  EXPECT_EQ(seen.size(), 5u);
  EXPECT_EQ(gen_tasks(compact_gen_config(8), 12), std::vector<TaskSpec>(tasks.begin(), tasks.begin() + 12));
}

TEST(QuestionTest, CountingTemplate) {
  const Annotation para{AnnotationLevel::kParagraph, "a cat and a bat", BBox{0, 0, 90, 7}};
  const std::vector<Annotation> scene = {para};
  bool found = false;
  for (std::uint64_t seed = 0; seed < 200 && !found; ++seed) {
    Rng rng(seed);
    for (const Question& q : questions_for(scene, para, rng)) {
      if (q.template_name != "count") continue;
      const char letter = q.prompt[std::string("How many times does the letter `").size()];
      const auto expected = std::count(para.text.begin(), para.text.end(), letter);
      EXPECT_EQ(q.answer, std::to_string(expected));
      EXPECT_NE(q.prompt.find("paragraph ending with `bat'"), std::string::npos);
      if (letter == 'a') {
        EXPECT_EQ(q.answer, "5");
        found = true;
      }
    }
  }
  EXPECT_TRUE(found);
}

TEST(QuestionTest, LineAndWordTemplates) {
  const std::vector<Annotation> scene = {
      {AnnotationLevel::kLine, "amber river", BBox{0, 0, 60, 7}},
      {AnnotationLevel::kLine, "amber stone", BBox{0, 10, 60, 17}},
      {AnnotationLevel::kLine, "cedar stone", BBox{0, 20, 60, 27}},
      {AnnotationLevel::kWord, "candle", BBox{0, 30, 30, 37}},
      {AnnotationLevel::kWord, "canyon", BBox{0, 40, 30, 47}},
  };
  Rng rng(0);
  EXPECT_TRUE(questions_for(scene, scene[0], rng).empty());
  const auto line = questions_for(scene, scene[2], rng);
  ASSERT_EQ(line.size(), 1u);
  EXPECT_EQ(line[0].prompt, "What does the line beginning with `cedar' say?");
  EXPECT_EQ(line[0].answer, "cedar stone");
  const auto word = questions_for(scene, scene[3], rng);
  ASSERT_EQ(word.size(), 1u);
  EXPECT_EQ(word[0].prompt, "Which word in the image starts with the letters `cand'?");
  EXPECT_TRUE(has_positional_cue("What is in the top corner?"));
  EXPECT_FALSE(has_positional_cue(word[0].prompt));
}

TEST(MulticropTest, Examples) {
  const BBox target{1000, 1000, 1010, 1008};
  const auto w = multicrop_windows(target, 2048, 2048, 3, 0.5);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_TRUE(w[2].contains(target));
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    EXPECT_TRUE(w[i].contains(w[i + 1]));
    EXPECT_FALSE(w[i] == w[i + 1]);
    EXPECT_LE(static_cast<double>(w[i + 1].area()), 0.5 * static_cast<double>(w[i].area()));
  }
  try {
    multicrop_windows(BBox{0, 0, 64, 64}, 64, 64, 2, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
  }
  EXPECT_THROW(multicrop_windows(target, 2048, 2048, 1, 0.5), Error);
}

TEST(MulticropTest, RandomTargetsSatisfyChainProperties) {
  Rng rng(3);
  int checked = 0;
  for (int i = 0; i < 3000; ++i) {
    const int W = static_cast<int>(rng.uniform_int(16, 400));
    const int H = static_cast<int>(rng.uniform_int(16, 400));
    const int x0 = static_cast<int>(rng.uniform_int(0, W - 1));
    const int y0 = static_cast<int>(rng.uniform_int(0, H - 1));
    const BBox t{x0, y0, static_cast<int>(rng.uniform_int(x0 + 1, std::min(W, x0 + 40))),
                 static_cast<int>(rng.uniform_int(y0 + 1, std::min(H, y0 + 20)))};
    const int steps = static_cast<int>(rng.uniform_int(2, 4));
    std::vector<BBox> w;
    try {
      w = multicrop_windows(t, W, H, steps, 0.5);
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::kInfeasible);
      // Infeasible only when the full image cannot host the first window.
      ASSERT_GT(static_cast<double>(t.area()) * std::pow(2.0, steps - 1), 0.25 * W * H);
      continue;
    }
    ++checked;
    ASSERT_EQ(static_cast<int>(w.size()), steps);
    ASSERT_TRUE(w.back().contains(t));
    for (std::size_t k = 0; k < w.size(); ++k) {
      ASSERT_TRUE(BBox(0, 0, W, H).contains(w[k]));
      if (k + 1 < w.size()) {
        ASSERT_TRUE(w[k].contains(w[k + 1]));
        ASSERT_LE(static_cast<double>(w[k + 1].area()), 0.5 * static_cast<double>(w[k].area()));
      }
    }
  }
  EXPECT_GT(checked, 2000);
}

TEST(DifficultyFilterTest, Examples) {
  EXPECT_FALSE(difficulty_filter(std::vector<bool>(8, true)));
  EXPECT_FALSE(difficulty_filter(std::vector<bool>(8, false)));
  EXPECT_TRUE(difficulty_filter({true, false, true, false, false, true, false, false}));
  EXPECT_THROW(difficulty_filter({true}), Error);
}

TEST(MvtoolTest, SmallBenchmark) {
  GenConfig cfg;
  cfg.rng_seed = 21;
  const auto scenes = mvtool_scenes(50, cfg);
  const auto items = gen_mvtool(scenes, 50, cfg);
  ASSERT_EQ(items.size(), 50u);
  std::map<TransformKind, int> hist;
  for (const BenchItem& it : items) {
    ++hist[it.transform];
    const SceneLayout& s = scenes[it.scene];
    EXPECT_LT(static_cast<double>(it.question.target.box.area()) / (double(s.width) * s.height), 1e-4);
    EXPECT_FALSE(has_positional_cue(it.question.prompt));
  }
  for (TransformKind k : kCorruptions) EXPECT_EQ(hist[k], 10);
  const TaskSpec t = materialize(items[0], render_scene(scenes[items[0].scene]));
  EXPECT_NO_THROW(validate_task(t));
  ASSERT_EQ(t.s_req.size(), 2u);
  EXPECT_EQ(t.s_req[0], *tool_for_transform(inverse(items[0].transform)));
  EXPECT_EQ(t.s_req[1], ToolId::kCrop);
  EXPECT_EQ(t.initial_image, apply_transform(t.canonical_image, items[0].transform));
}

TEST(OrientationSuiteTest, SixVariants) {
  const GenConfig cfg = compact_gen_config(2);
  const SceneDoc scene = synth_scene(2, 12, kSmall);
  Rng rng(5);
  const BaseItem base = base_item(scene, cfg, rng, "item");
  const std::vector<TaskSpec> suite = gen_orientation_suite(std::span<const BaseItem>(&base, 1));
  ASSERT_EQ(suite.size(), 6u);
  EXPECT_EQ(suite[0].id, "item/source");
  EXPECT_TRUE(suite[0].s_req.empty());
  EXPECT_EQ(suite[0].initial_image, base.canonical_image);
  bool saw_r90 = false;
  for (std::size_t i = 1; i < suite.size(); ++i) {
    ASSERT_EQ(suite[i].s_req.size(), 1u);
    EXPECT_NO_THROW(validate_task(suite[i]));
    if (suite[i].s_req[0] == ToolId::kRotate90) {
      saw_r90 = true;
      EXPECT_EQ(suite[i].initial_image, apply_transform(base.canonical_image, TransformKind::kRot270));
    }
  }
  EXPECT_TRUE(saw_r90);
}

TEST(DiagnosticTest, OracleAndAmbiguity) {
  std::vector<Raster> images;
  for (std::uint64_t i = 0; i < 40; ++i) images.push_back(synth_scene(i, 4, SceneOptions{256, 192}).image);
  images.push_back(Raster(8, 8, Rgb{1, 1, 1}));
  const DiagnosticSet set = gen_diagnostic(images, 7);
  ASSERT_EQ(set.items.size(), images.size() - 1);
  EXPECT_EQ(set.ambiguous, std::vector<std::size_t>{40});
  for (const DiagnosticItem& it : set.items) {
    if (it.image_index == 40) continue;
    const auto found = detect_transform(images[it.image_index], it.observed);
    ASSERT_EQ(found.size(), 1u);
    EXPECT_EQ(found[0], it.transform);
  }
  EXPECT_EQ(diagnostic_option(TransformKind::kRot90), 'A');
  EXPECT_EQ(diagnostic_option(TransformKind::kFlipV), 'E');
  EXPECT_EQ(gen_diagnostic(images, 7).items.size(), set.items.size());
}

TEST(ImportTest, ReadsRecordsAndReportsLine) {
  const fs::path dir = fs::temp_directory_path() / "toolvis_import_test";
  fs::create_directories(dir);
  write_ppm(dir / "img.ppm", Raster(20, 10, Rgb{9, 9, 9}));
  {
    std::ofstream f(dir / "scenes.jsonl");
    f << R"({"image_path": "img.ppm", "annotations": [{"level": "word", "text": "hi", "vertices": [[1.5, 2], [6, 2], [6, 4.2], [1.5, 4.2]]}]})"
      << "\n";
  }
  const auto scenes = import_scenes(dir / "scenes.jsonl");
  ASSERT_EQ(scenes.size(), 1u);
  EXPECT_EQ(scenes[0].provenance, Provenance::kImported);
  ASSERT_EQ(scenes[0].annotations.size(), 1u);
  EXPECT_EQ(scenes[0].annotations[0].box, (BBox{1, 2, 6, 5}));
  {
    std::ofstream f(dir / "scenes.jsonl", std::ios::app);
    f << R"({"image_path": "img.ppm", "annotations": [{"level": "glyph", "text": "x", "vertices": [[0,0],[1,1]]}]})"
      << "\n";
  }
  try {
    import_scenes(dir / "scenes.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCorruptRecord);
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  fs::remove_all(dir);
}

}  // namespace
}  // namespace toolvis
