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

#include "toolvis/verify.hpp"

#include <cmath>
#include <functional>

#include "toolvis/policies.hpp"
#include "toolvis/store.hpp"

namespace toolvis {
namespace {

Raster random_raster(Rng& rng, int max_side) {
  const int w = static_cast<int>(rng.uniform_int(1, max_side));
  const int h = static_cast<int>(rng.uniform_int(1, max_side));
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h * 3);
  for (auto& b : bytes) b = static_cast<std::uint8_t>(rng.next() & 0xff);
  return Raster(w, h, std::move(bytes));
}

CheckResult check(std::string name, const std::function<std::string()>& body) {
  CheckResult r{std::move(name), false, ""};
  try {
    r.detail = body();
    r.passed = r.detail.empty();
  } catch (const std::exception& e) {
    r.detail = std::string("exception: ") + e.what();
  }
  return r;
}

}  // namespace

GenConfig compact_gen_config(std::uint64_t seed) {
  GenConfig cfg;
  cfg.rng_seed = seed;
  cfg.scene_width = 384;
  cfg.scene_height = 384;
  cfg.scene_words = 20;
  cfg.area_threshold = 2e-3;
  return cfg;
}

std::vector<CheckResult> run_self_checks(std::uint64_t seed,
                                         const std::filesystem::path& scratch) {
  std::vector<CheckResult> out;
  out.push_back(check("dihedral-group-laws", [&]() -> std::string {
    Rng rng(derive_seed(seed, 1));
    for (int i = 0; i < 200; ++i) {
      const Raster img = random_raster(rng, 16);
      auto t = [](const Raster& r, TransformKind k) { return apply_transform(r, k); };
      const Raster r90 = t(img, TransformKind::kRot90);
      if (!(t(t(t(r90, TransformKind::kRot90), TransformKind::kRot90), TransformKind::kRot90) ==
            img)) {
        return "rot90^4 != identity";
      }
      if (!(t(r90, TransformKind::kRot90) == t(img, TransformKind::kRot180))) {
        return "rot90 rot90 != rot180";
      }
      if (!(t(t(img, TransformKind::kFlipH), TransformKind::kFlipV) ==
            t(img, TransformKind::kRot180))) {
        return "hflip vflip != rot180";
      }
    }
    return "";
  }));
  out.push_back(check("iou-pixel-oracle", [&]() -> std::string {
    Rng rng(derive_seed(seed, 2));
    auto box = [&] {
      const int x0 = static_cast<int>(rng.uniform_int(0, 11));
      const int y0 = static_cast<int>(rng.uniform_int(0, 11));
      return BBox{x0, y0, static_cast<int>(rng.uniform_int(x0 + 1, 12)),
                  static_cast<int>(rng.uniform_int(y0 + 1, 12))};
    };
    for (int i = 0; i < 2000; ++i) {
      const BBox a = box();
      const BBox b = box();
      int inter = 0, uni = 0;
      for (int y = 0; y < 12; ++y) {
        for (int x = 0; x < 12; ++x) {
          const bool ia = a.contains_point(x, y);
          const bool ib = b.contains_point(x, y);
          inter += ia && ib;
          uni += ia || ib;
        }
      }
      if (std::abs(iou(a, b) - static_cast<double>(inter) / uni) > 1e-12) {
        return "mismatch for " + to_string(a) + " vs " + to_string(b);
      }
    }
    return "";
  }));
  out.push_back(check("parser-fuzz", [&]() -> std::string {
    Rng rng(derive_seed(seed, 3));
    static constexpr char kAlphabet[] = "abcrotep9_-0123456789(),=|\" \n.\\t";
    for (int i = 0; i < 20000; ++i) {
      std::string s(static_cast<std::size_t>(rng.uniform_int(0, 24)), ' ');
      for (char& c : s) {
        c = rng.bernoulli(0.8) ? kAlphabet[rng.uniform_int(0, sizeof(kAlphabet) - 2)]
                               : static_cast<char>(rng.next() & 0xff);
      }
      try {
        const ToolProgram p = parse(s);
        if (!(parse(render(p)) == p)) return "render/parse round trip failed";
      } catch (const ParseError& e) {
        if (std::string(e.what()).empty()) return "empty parse error message";
      }
    }
    return "";
  }));
  out.push_back(check("chaining-equivalence", [&]() -> std::string {
    Rng rng(derive_seed(seed, 4));
    const ToolRegistry reg = ToolRegistry::builtin();
    static constexpr const char* kCalls[] = {
        "rotate90()", "rotate180()", "rotate270()", "flip-horizontal()", "flip-vertical()",
        "crop(x0=1, y0=1, x1=5, y1=4)", "brightness(factor=1.3)", "contrast(factor=0.7)",
        "grayscale()", "blur(radius=1)", "sharpen()", "edge-detect()"};
    for (int i = 0; i < 300; ++i) {
      const Raster img = random_raster(rng, 12);
      const std::string a = kCalls[rng.uniform_int(0, 11)];
      const std::string b = kCalls[rng.uniform_int(0, 11)];
      const ExecOutcome chained = execute(a + " | " + b, img, reg);
      const ExecOutcome first = execute(a, img, reg);
      if (!first.ok()) {
        if (chained.ok()) return "chain succeeded although '" + a + "' failed";
        continue;
      }
      const ExecOutcome second = execute(b, first.success().result, reg);
      if (chained.ok() != second.ok()) return "'" + a + " | " + b + "' disagrees on success";
      if (chained.ok() && !(chained.success().result == second.success().result)) {
        return "'" + a + " | " + b + "' differs from two steps";
      }
    }
    return "";
  }));
  out.push_back(check("difficulty-filter", []() -> std::string {
    for (int s = 0; s <= 8; ++s) {
      std::vector<bool> v(8, false);
      for (int i = 0; i < s; ++i) v[static_cast<std::size_t>(i)] = true;
      if (difficulty_filter(v) != (s >= 1 && s <= 7)) return "wrong at " + std::to_string(s);
    }
    return "";
  }));
  const GenConfig cfg = compact_gen_config(seed);
  const std::vector<TaskSpec> tasks = gen_tasks(cfg, 20);
  const Environment env;
  const RewardConfig rcfg;
  out.push_back(check("oracle-rewards", [&]() -> std::string {
    for (const TaskSpec& t : tasks) {
      const auto task = std::make_shared<const TaskSpec>(t);
      const RewardBreakdown o =
          score_trajectory(run_episode(env, PolicySpec{PolicyKind::kOracle, 0, std::nullopt, false}, task), t, rcfg);
      const double expected = t.s_req.empty() ? 1.1 : 2.6;
      if (std::abs(o.total - expected) > 1e-9) {
        return t.id + ": oracle total " + std::to_string(o.total);
      }
      const RewardBreakdown h = score_trajectory(
          run_episode(env, PolicySpec{PolicyKind::kRewardHacker, 0, std::nullopt, false}, task), t, rcfg);
      if (!(h.total < o.total)) return t.id + ": reward hacker not below oracle";
    }
    return "";
  }));
  out.push_back(check("store-round-trip", [&]() -> std::string {
    std::vector<TrajectoryRecord> recs;
    for (std::size_t i = 0; i < tasks.size() && i < 5; ++i) {
      recs.push_back(TrajectoryRecord{
          tasks[i].id, 0, "clumsy",
          run_episode(env, PolicySpec{PolicyKind::kClumsy, 0, std::nullopt, false},
                      std::make_shared<const TaskSpec>(tasks[i]))});
    }
    const auto dir = scratch / "verify-store";
    write_tasks(dir / "tasks.jsonl", tasks);
    write_trajectories(dir / "trajectories.jsonl", recs);
    if (!(read_tasks(dir / "tasks.jsonl") == tasks)) return "tasks differ after round trip";
    if (!(read_trajectories(dir / "trajectories.jsonl") == recs)) {
      return "trajectories differ after round trip";
    }
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
    return "";
  }));
  return out;
}

}  // namespace toolvis
