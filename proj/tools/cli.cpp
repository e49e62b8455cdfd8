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

#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "toolvis/datagen.hpp"
#include "toolvis/kv.hpp"
#include "toolvis/policies.hpp"
#include "toolvis/store.hpp"
#include "toolvis/verify.hpp"

namespace toolvis {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string config;

  std::uint64_t resolved_seed() const {
    if (seed) return *seed;
    const char* env = std::getenv("CODEVISION_SEED");
    if (env == nullptr || *env == '\0') return 0;
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw UsageError("CODEVISION_SEED is not an unsigned integer: " + std::string(s));
    }
    return v;
  }

  KeyValues kv() const { return config.empty() ? KeyValues() : KeyValues::from_arg(config); }
};

void add_common(CLI::App* cmd, Common& c, bool out_required) {
  cmd->add_option("--seed", c.seed, "RNG seed (falls back to CODEVISION_SEED, then 0)");
  auto* out = cmd->add_option("--out", c.out, "output path");
  if (out_required) out->required();
}

GenConfig gen_config(const Common& c, std::optional<int> scene_size) {
  GenConfig cfg = GenConfig::from_kv(c.kv());
  cfg.rng_seed = c.resolved_seed();
  if (scene_size) {
    cfg.scene_width = *scene_size;
    cfg.scene_height = *scene_size;
  }
  cfg.validate();
  return cfg;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const auto idx = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1) + 0.5);
  return v[std::min(idx, v.size() - 1)];
}

std::string file_sha256(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return sha256_hex(s.str());
}

void print_histogram(std::ostream& out, const std::map<TransformKind, int>& hist) {
  for (TransformKind k : kAllTransforms) {
    if (k == TransformKind::kIdentity) continue;
    const auto it = hist.find(k);
    out << "transform_" << transform_name(k) << "=" << (it == hist.end() ? 0 : it->second) << "\n";
  }
}

TransformKind observed_transform(const TaskSpec& t) {
  const auto found = detect_transform(t.canonical_image, t.initial_image);
  return found.empty() ? TransformKind::kIdentity : found.front();
}

// --- gen-bench ---

void bench_mvtool(const GenConfig& cfg, int n, const fs::path& dir, std::ostream& out) {
  const std::vector<SceneLayout> scenes = mvtool_scenes(n, cfg);
  const std::vector<BenchItem> items = gen_mvtool(scenes, n, cfg);
  std::map<std::size_t, std::vector<const BenchItem*>> by_scene;
  for (const BenchItem& it : items) by_scene[it.scene].push_back(&it);

  ImageStore images(dir);
  std::vector<Json> records(items.size());
  std::map<const BenchItem*, std::size_t> position;
  for (std::size_t i = 0; i < items.size(); ++i) position[&items[i]] = i;
  std::map<TransformKind, int> hist;
  std::vector<double> ratios;
  int cue_hits = 0;
  for (const auto& [scene, members] : by_scene) {
    const Raster canonical = render_scene(scenes[scene]);
    for (const BenchItem* it : members) {
      const TaskSpec task = materialize(*it, canonical);
      validate_task(task);
      records[position[it]] = task_to_json(task, images);
      ++hist[it->transform];
      ratios.push_back(static_cast<double>(it->question.target.box.area()) /
                       (static_cast<double>(canonical.width()) * canonical.height()));
      cue_hits += has_positional_cue(task.question) ? 1 : 0;
    }
  }
  write_jsonl(dir / "manifest.jsonl", records);
  out << "kind=mvtool\nitems=" << items.size() << "\nscenes=" << scenes.size() << "\n";
  print_histogram(out, hist);
  out << "area_ratio_min=" << fmt(quantile(ratios, 0)) << "\n"
      << "area_ratio_p50=" << fmt(quantile(ratios, 0.5)) << "\n"
      << "area_ratio_p90=" << fmt(quantile(ratios, 0.9)) << "\n"
      << "area_ratio_max=" << fmt(quantile(ratios, 1)) << "\n"
      << "positional_cues=" << cue_hits << "\n";
}

void bench_orientation(const GenConfig& cfg, int n, const fs::path& dir, std::ostream& out) {
  std::vector<BaseItem> base;
  const SceneOptions opts{cfg.scene_width, cfg.scene_height};
  for (int i = 0; i < n; ++i) {
    const std::uint64_t scene_seed = derive_seed(cfg.rng_seed ^ 0x0A1EULL, static_cast<std::uint64_t>(i));
    const SceneDoc scene = synth_scene(scene_seed, cfg.scene_words, opts);
    Rng rng(derive_seed(scene_seed, 3));
    char id[32];
    std::snprintf(id, sizeof(id), "orient-%04d", i);
    base.push_back(base_item(scene, cfg, rng, id));
  }
  const std::vector<TaskSpec> tasks = gen_orientation_suite(base);
  write_tasks(dir / "manifest.jsonl", tasks);
  std::map<TransformKind, int> hist;
  for (const TaskSpec& t : tasks) {
    if (!t.s_req.empty()) ++hist[observed_transform(t)];
  }
  out << "kind=orientation\nbase_items=" << base.size() << "\nitems=" << tasks.size() << "\n";
  print_histogram(out, hist);
}

void bench_diagnostic(const GenConfig& cfg, int n, const fs::path& dir, std::ostream& out) {
  std::vector<Raster> sources;
  const SceneOptions opts{cfg.scene_width, cfg.scene_height};
  const int words = std::max(1, std::min(cfg.scene_words, 6));
  for (int i = 0; i < n; ++i) {
    sources.push_back(
        synth_scene(derive_seed(cfg.rng_seed ^ 0xD1A6ULL, static_cast<std::uint64_t>(i)), words,
                    opts)
            .image);
  }
  const DiagnosticSet set = gen_diagnostic(sources, cfg.rng_seed);
  ImageStore images(dir);
  std::vector<Json> records;
  std::map<TransformKind, int> hist;
  int oracle_correct = 0;
  for (const DiagnosticItem& it : set.items) {
    const Raster& source = sources[it.image_index];
    const auto found = detect_transform(source, it.observed);
    if (found.size() == 1 && found.front() == it.transform) ++oracle_correct;
    ++hist[it.transform];
    Json j;
    j["schema"] = std::string(kDiagnosticSchema);
    j["id"] = it.id;
    j["question"] = std::string(kDiagnosticQuestion);
    j["image"] = image_ref_to_json(images.put(it.observed));
    j["source_image"] = image_ref_to_json(images.put(source));
    j["transform"] = std::string(transform_name(it.transform));
    j["answer"] = std::string(1, diagnostic_option(it.transform));
    records.push_back(std::move(j));
  }
  write_jsonl(dir / "manifest.jsonl", records);
  out << "kind=diagnostic\nitems=" << set.items.size() << "\n";
  print_histogram(out, hist);
  out << "ambiguous=" << set.ambiguous.size() << "\noracle_correct=" << oracle_correct << "\n";
}

// --- gen-sft / gen-rl ---

PolicySpec policy(PolicyKind kind, std::uint64_t seed = 0) {
  return PolicySpec{kind, seed, std::nullopt, false};
}

void gen_sft(const GenConfig& cfg, int n, const fs::path& dir, std::ostream& out) {
  const std::vector<TaskSpec> tasks = gen_tasks(cfg, n);
  const Environment env;
  const RewardConfig rcfg;
  std::vector<TrainingExample> examples;
  std::vector<TaskSpec> kept_tasks;
  double masked = 0;
  for (const TaskSpec& t : tasks) {
    const auto task = std::make_shared<const TaskSpec>(t);
    const PolicyKind kind =
        t.task_type == TaskType::kErrorHandling ? PolicyKind::kClumsy : PolicyKind::kOracle;
    const Trajectory traj = run_episode(env, policy(kind), task);
    if (outcome_reward(traj, t).r_acc != 1) continue;
    examples.push_back(to_training_example(traj, t, env.registry()));
    masked += masked_fraction(examples.back());
    kept_tasks.push_back(t);
  }
  write_tasks(dir / "tasks.jsonl", kept_tasks);
  write_training_examples(dir / "sft.jsonl", examples);
  out << "tasks=" << tasks.size() << "\nexamples=" << examples.size()
      << "\ndropped=" << tasks.size() - examples.size() << "\nmasked_fraction_mean="
      << fmt(examples.empty() ? 0 : masked / static_cast<double>(examples.size())) << "\n";
}

std::vector<PolicySpec> rl_mix(std::uint64_t seed, int k) {
  static constexpr PolicyKind kCycle[] = {PolicyKind::kOracle, PolicyKind::kRandom,
                                          PolicyKind::kTrialAndError, PolicyKind::kRandom,
                                          PolicyKind::kClumsy, PolicyKind::kRandom,
                                          PolicyKind::kRewardHacker, PolicyKind::kRandom};
  std::vector<PolicySpec> mix;
  for (int i = 0; i < k; ++i) {
    mix.push_back(policy(kCycle[i % 8], derive_seed(seed, static_cast<std::uint64_t>(i))));
  }
  return mix;
}

void gen_rl(const GenConfig& cfg, int n, int k, const fs::path& dir, std::ostream& out) {
  const std::vector<TaskSpec> tasks = gen_tasks(cfg, n);
  const Environment env;
  RewardConfig rcfg;
  rcfg.group_k = k;
  const std::vector<PolicySpec> mix = rl_mix(cfg.rng_seed, k);
  std::vector<TaskSpec> kept;
  int too_easy = 0, too_hard = 0;
  for (const TaskSpec& t : tasks) {
    const GroupRollout g =
        rollout_group(env, mix, std::make_shared<const TaskSpec>(t), k, rcfg);
    std::vector<bool> successes;
    for (const RewardBreakdown& b : g.breakdowns) successes.push_back(b.r_acc == 1);
    if (difficulty_filter(successes)) {
      kept.push_back(t);
    } else if (successes.front()) {
      ++too_easy;
    } else {
      ++too_hard;
    }
  }
  write_tasks(dir / "tasks.jsonl", kept);
  out << "tasks=" << tasks.size() << "\nkept=" << kept.size() << "\nall_correct=" << too_easy
      << "\nall_wrong=" << too_hard << "\n";
}

// --- run-policy / score ---

void run_policy(PolicyKind kind, const fs::path& manifest, int k, std::uint64_t seed,
                const fs::path& out_path, std::ostream& out) {
  const std::vector<TaskSpec> tasks = read_tasks(manifest);
  const Environment env;
  std::vector<TrajectoryRecord> records;
  int answered = 0, correct = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto task = std::make_shared<const TaskSpec>(tasks[i]);
    const std::uint64_t task_seed = derive_seed(seed, i);
    for (int r = 0; r < k; ++r) {
      Trajectory traj =
          run_episode(env, policy(kind, derive_seed(task_seed, static_cast<std::uint64_t>(r))), task);
      if (traj.final_answer) {
        ++answered;
        correct += check_answer(*traj.final_answer, task->gold_answer) ? 1 : 0;
      }
      records.push_back(TrajectoryRecord{task->id, r, std::string(policy_kind_name(kind)),
                                         std::move(traj)});
    }
  }
  write_trajectories(out_path, records);
  out << "policy=" << policy_kind_name(kind) << "\ntasks=" << tasks.size()
      << "\ntrajectories=" << records.size() << "\nanswered=" << answered
      << "\ncorrect=" << correct << "\n";
}

void score(const fs::path& traj_path, const fs::path& manifest, const RewardConfig& cfg,
           const fs::path& out_path, std::ostream& out) {
  std::map<std::string, TaskSpec> tasks;
  for (TaskSpec& t : read_tasks(manifest)) {
    std::string id = t.id;
    tasks.emplace(std::move(id), std::move(t));
  }
  const std::vector<TrajectoryRecord> trajs = read_trajectories(traj_path);
  std::vector<RewardRecord> records;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (const TrajectoryRecord& rec : trajs) {
    const auto it = tasks.find(rec.trajectory.task_id);
    if (it == tasks.end()) {
      throw Error(ErrorCode::kCorruptRecord,
                  "trajectory for unknown task '" + rec.trajectory.task_id + "'");
    }
    groups[rec.group].push_back(records.size());
    records.push_back(RewardRecord{rec.trajectory.task_id, rec.group, rec.rollout, false,
                                   score_trajectory(rec.trajectory, it->second, cfg)});
  }
  int finalized = 0;
  for (const auto& [name, members] : groups) {
    if (static_cast<int>(members.size()) != cfg.group_k) continue;
    std::vector<RewardBreakdown> group;
    for (std::size_t i : members) group.push_back(records[i].breakdown);
    finalize_group(group, cfg);
    for (std::size_t j = 0; j < members.size(); ++j) {
      records[members[j]].breakdown = group[j];
      records[members[j]].group_finalized = true;
    }
    ++finalized;
  }
  write_rewards(out_path, records);
  double total = 0;
  int matches = 0, penalized = 0, correct = 0;
  for (const RewardRecord& r : records) {
    total += r.breakdown.total;
    matches += r.breakdown.traj_match > 0 ? 1 : 0;
    penalized += r.breakdown.penalties.sum() > 0 ? 1 : 0;
    correct += r.breakdown.r_acc == 1 ? 1 : 0;
  }
  const double count = records.empty() ? 1 : static_cast<double>(records.size());
  out << "records=" << records.size() << "\ngroups=" << groups.size()
      << "\ngroups_finalized=" << finalized << "\ncorrect=" << correct
      << "\ntraj_match=" << matches << "\npenalized=" << penalized
      << "\nmean_total=" << fmt(total / count) << "\n";
}

// --- repl ---

void repl(const fs::path& manifest, const std::string& task_id, const std::string& out_path,
          std::istream& in, std::ostream& out) {
  std::shared_ptr<const TaskSpec> task;
  for (TaskSpec& t : read_tasks(manifest)) {
    if (t.id == task_id) task = std::make_shared<const TaskSpec>(std::move(t));
  }
  if (!task) throw UsageError("no task '" + task_id + "' in " + manifest.string());
  const Environment env;
  Episode ep = env.reset(task);
  out << render_prompt(*task, env.registry()) << "\n";
  out << "(enter an action; a blank line submits it)\n";
  std::string pending, line;
  auto submit = [&] {
    if (pending.empty()) return;
    const StepResult r = ep.step(pending);
    pending.clear();
    out << r.feedback << "\n";
    out << "image=" << r.image.width() << "x" << r.image.height() << "\n";
  };
  while (!ep.done() && std::getline(in, line)) {
    if (line.empty()) {
      submit();
    } else {
      if (!pending.empty()) pending += '\n';
      pending += line;
    }
  }
  if (!ep.done()) submit();
  if (!ep.done()) ep.abort();
  const Trajectory& traj = ep.trajectory();
  out << "termination=" << termination_name(*traj.termination) << "\nturns=" << traj.turns.size()
      << "\ncorrect=" << (traj.final_answer && check_answer(*traj.final_answer, task->gold_answer))
      << "\n";
  if (!out_path.empty()) {
    write_trajectories(out_path, {TrajectoryRecord{task->id, 0, "human", traj}});
  }
}

void require_positive(int v, const char* flag) {
  if (v <= 0) throw UsageError(std::string(flag) + " must be positive");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"toolvis: benchmark generation, scripted policies and reward scoring"};
  app.require_subcommand(1);

  Common c;
  std::optional<int> scene_size;
  int n = 0, rl_k = 8, run_k = 1;
  std::string kind, policy_name, manifest, trajectories, task_id;

  auto* bench = app.add_subcommand("gen-bench", "generate a benchmark manifest and images");
  add_common(bench, c, true);
  bench->add_option("--kind", kind, "mvtool | orientation | diagnostic")
      ->required()
      ->check(CLI::IsMember({"mvtool", "orientation", "diagnostic"}));
  bench->add_option("--n", n, "number of items (base items for orientation)")->required();
  bench->add_option("--config", c.config, "generator config file or k=v,k=v");
  bench->add_option("--scene-size", scene_size, "scene width and height in pixels");

  auto* sft = app.add_subcommand("gen-sft", "generate SFT examples from scripted rollouts");
  add_common(sft, c, true);
  sft->add_option("--n", n, "number of tasks")->required();
  sft->add_option("--config", c.config, "generator config file or k=v,k=v");
  sft->add_option("--scene-size", scene_size, "scene width and height in pixels");

  auto* rl = app.add_subcommand("gen-rl", "generate difficulty-filtered RL tasks");
  add_common(rl, c, true);
  rl->add_option("--n", n, "number of candidate tasks")->required();
  rl->add_option("--k", rl_k, "rollouts per task")->capture_default_str();
  rl->add_option("--config", c.config, "generator config file or k=v,k=v");
  rl->add_option("--scene-size", scene_size, "scene width and height in pixels");

  auto* run = app.add_subcommand("run-policy", "roll out a scripted policy over a manifest");
  add_common(run, c, true);
  run->add_option("--policy", policy_name, "oracle | trial-and-error | reward-hacker | clumsy | random")
      ->required();
  run->add_option("--manifest", manifest, "task manifest (JSONL)")->required();
  run->add_option("--k", run_k, "rollouts per task")->capture_default_str();

  auto* sc = app.add_subcommand("score", "score trajectories and finalize groups");
  add_common(sc, c, true);
  sc->add_option("--trajectories", trajectories, "trajectory JSONL")->required();
  sc->add_option("--manifest", manifest, "task manifest (JSONL)")->required();
  sc->add_option("--config", c.config, "reward config file or k=v,k=v");

  auto* ver = app.add_subcommand("verify", "run the embedded invariant checks");
  add_common(ver, c, false);

  auto* rp = app.add_subcommand("repl", "step one task interactively");
  add_common(rp, c, false);
  rp->add_option("--manifest", manifest, "task manifest (JSONL)")->required();
  rp->add_option("--task", task_id, "task id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*bench) {
      require_positive(n, "--n");
      if (!scene_size && kind == "diagnostic") scene_size = 256;
      const GenConfig cfg = gen_config(c, scene_size);
      fs::create_directories(c.out);
      if (kind == "mvtool") bench_mvtool(cfg, n, c.out, out);
      if (kind == "orientation") bench_orientation(cfg, n, c.out, out);
      if (kind == "diagnostic") bench_diagnostic(cfg, n, c.out, out);
      out << "manifest_sha256=" << file_sha256(fs::path(c.out) / "manifest.jsonl") << "\n";
    } else if (*sft) {
      require_positive(n, "--n");
      const GenConfig cfg = gen_config(c, scene_size);
      fs::create_directories(c.out);
      gen_sft(cfg, n, c.out, out);
    } else if (*rl) {
      require_positive(n, "--n");
      if (rl_k < 2) throw UsageError("--k must be at least 2");
      const GenConfig cfg = gen_config(c, scene_size);
      fs::create_directories(c.out);
      gen_rl(cfg, n, rl_k, c.out, out);
    } else if (*run) {
      require_positive(run_k, "--k");
      const auto kind_id = policy_kind_from_name(policy_name);
      if (!kind_id) throw UsageError("unknown policy '" + policy_name + "'");
      run_policy(*kind_id, manifest, run_k, c.resolved_seed(), c.out, out);
      out << "sha256=" << file_sha256(c.out) << "\n";
    } else if (*sc) {
      score(trajectories, manifest, RewardConfig::from_kv(c.kv()), c.out, out);
      out << "sha256=" << file_sha256(c.out) << "\n";
    } else if (*ver) {
      const fs::path scratch = c.out.empty() ? fs::temp_directory_path() : fs::path(c.out);
      fs::create_directories(scratch);
      int failed = 0;
      std::ostringstream report;
      for (const CheckResult& r : run_self_checks(c.resolved_seed(), scratch)) {
        report << "check=" << r.name << " status=" << (r.passed ? "PASS" : "FAIL");
        if (!r.passed) report << " detail=\"" << r.detail << "\"";
        report << "\n";
        failed += r.passed ? 0 : 1;
      }
      report << "failed=" << failed << "\n";
      out << report.str();
      if (!c.out.empty()) write_file_atomic(scratch / "verify.txt", report.str());
      return failed == 0 ? kExitOk : kExitData;
    } else if (*rp) {
      repl(manifest, task_id, c.out, in, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) {
      err << "usage error: " << e.what() << "\n";
      return kExitUsage;
    }
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace toolvis
