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

#include "toolvis/store.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "toolvis/ppm.hpp"

namespace toolvis {
namespace fs = std::filesystem;
namespace {

Json box_to_json(const BBox& b) { return Json::array({b.x0, b.y0, b.x1, b.y1}); }

BBox box_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw Error(ErrorCode::kCorruptRecord, "box must be [x0, y0, x1, y1]");
  }
  return BBox{j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>(), j.at(3).get<int>()};
}

Json opt_string(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }

std::optional<std::string> opt_string_from(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<std::string>();
}

void check_schema(const Json& j, std::string_view schema) {
  const std::string got = j.at("schema").get<std::string>();
  if (got != schema) {
    throw Error(ErrorCode::kCorruptRecord,
                "expected schema " + std::string(schema) + ", got " + got);
  }
}

Json applied_to_json(const std::vector<AppliedCall>& calls) {
  Json arr = Json::array();
  for (const AppliedCall& c : calls) {
    Json j = {{"tool", c.tool}};
    if (c.region) j["region"] = box_to_json(*c.region);
    if (c.orientation) j["transform"] = std::string(transform_name(*c.orientation));
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<AppliedCall> applied_from_json(const Json& arr) {
  std::vector<AppliedCall> out;
  for (const Json& j : arr) {
    AppliedCall c;
    c.tool = j.at("tool").get<std::string>();
    if (j.contains("region")) c.region = box_from_json(j.at("region"));
    if (j.contains("transform")) {
      c.orientation = transform_from_name(j.at("transform").get<std::string>());
      if (!c.orientation) throw Error(ErrorCode::kCorruptRecord, "unknown transform");
    }
    out.push_back(std::move(c));
  }
  return out;
}

Json outcome_to_json(const ExecOutcome& o) {
  if (o.ok()) {
    return {{"status", "ok"},
            {"applied", applied_to_json(o.success().applied)},
            {"log", o.success().log}};
  }
  const ExecFailure& f = o.failure();
  return {{"status", "error"},
          {"kind", std::string(exec_error_name(f.kind))},
          {"message", f.message},
          {"span",
           {{"offset", f.span.offset},
            {"length", f.span.length},
            {"line", f.span.line},
            {"column", f.span.column}}},
          {"applied_prefix", applied_to_json(f.applied_prefix)}};
}

ExecOutcome outcome_from_json(const Json& j, const Raster& result) {
  const std::string status = j.at("status").get<std::string>();
  if (status == "ok") {
    return ExecSuccess{result, applied_from_json(j.at("applied")), j.at("log").get<std::string>()};
  }
  if (status != "error") throw Error(ErrorCode::kCorruptRecord, "unknown outcome status");
  ExecFailure f;
  const auto kind = exec_error_from_name(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorCode::kCorruptRecord, "unknown error kind");
  f.kind = *kind;
  f.message = j.at("message").get<std::string>();
  const Json& s = j.at("span");
  f.span = SourceSpan{s.at("offset").get<std::size_t>(), s.at("length").get<std::size_t>(),
                      s.at("line").get<int>(), s.at("column").get<int>()};
  f.applied_prefix = applied_from_json(j.at("applied_prefix"));
  return f;
}

// Decodes every line of a JSONL file, attributing failures to their line.
template <typename T>
std::vector<T> read_records(const fs::path& path, const std::function<T(const Json&)>& decode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::vector<T> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    try {
      out.push_back(decode(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kCorruptRecord, where + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kChecksumMismatch || e.code() == ErrorCode::kIo) throw;
      throw Error(ErrorCode::kCorruptRecord, where + e.what());
    }
  }
  return out;
}

fs::path store_root(const fs::path& file) {
  const fs::path parent = file.parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 15]);
  }
  return out;
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot rename into " + path.string());
  }
}

ImageRef ImageStore::put(const Raster& img) {
  const std::string bytes = encode_ppm(img);
  ImageRef ref;
  ref.sha256 = sha256_hex(bytes);
  ref.path = "images/" + ref.sha256 + ".ppm";
  const fs::path full = root_ / ref.path;
  std::error_code ec;
  if (!fs::exists(full, ec)) write_file_atomic(full, bytes);
  return ref;
}

Raster ImageStore::get(const ImageRef& ref) const {
  if (const auto it = cache_.find(ref.sha256); it != cache_.end()) return it->second;
  const fs::path full = root_ / ref.path;
  std::ifstream in(full, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "missing image " + full.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  const std::string digest = sha256_hex(bytes);
  if (digest != ref.sha256) {
    throw Error(ErrorCode::kChecksumMismatch, "image " + full.string() + " has sha256 " + digest +
                                                  ", expected " + ref.sha256);
  }
  Raster img = decode_ppm(bytes);
  cache_.emplace(ref.sha256, img);
  return img;
}

Json image_ref_to_json(const ImageRef& ref) {
  return {{"path", ref.path}, {"sha256", ref.sha256}};
}

ImageRef image_ref_from_json(const Json& j) {
  return ImageRef{j.at("path").get<std::string>(), j.at("sha256").get<std::string>()};
}

Json task_to_json(const TaskSpec& task, ImageStore& images) {
  Json s_req = Json::array();
  for (ToolId id : task.s_req) s_req.push_back(std::string(tool_name(id)));
  return {{"schema", kTaskSchema},
          {"id", task.id},
          {"question", task.question},
          {"initial_image", image_ref_to_json(images.put(task.initial_image))},
          {"canonical_image", image_ref_to_json(images.put(task.canonical_image))},
          {"gold_answer", task.gold_answer},
          {"task_type", std::string(task_type_name(task.task_type))},
          {"s_req", s_req},
          {"target_box", task.target_box ? box_to_json(*task.target_box) : Json(nullptr)},
          {"max_turns", task.max_turns},
          {"scripted_fault", opt_string(task.scripted_fault)}};
}

TaskSpec task_from_json(const Json& j, const ImageStore& images) {
  check_schema(j, kTaskSchema);
  TaskSpec t;
  t.id = j.at("id").get<std::string>();
  t.question = j.at("question").get<std::string>();
  t.initial_image = images.get(image_ref_from_json(j.at("initial_image")));
  t.canonical_image = images.get(image_ref_from_json(j.at("canonical_image")));
  t.gold_answer = j.at("gold_answer").get<std::string>();
  const auto type = task_type_from_name(j.at("task_type").get<std::string>());
  if (!type) throw Error(ErrorCode::kCorruptRecord, "unknown task type");
  t.task_type = *type;
  for (const Json& s : j.at("s_req")) {
    const auto id = tool_from_name(s.get<std::string>());
    if (!id) throw Error(ErrorCode::kCorruptRecord, "unknown tool in s_req");
    t.s_req.push_back(*id);
  }
  if (!j.at("target_box").is_null()) t.target_box = box_from_json(j.at("target_box"));
  t.max_turns = j.at("max_turns").get<int>();
  t.scripted_fault = opt_string_from(j, "scripted_fault");
  return t;
}

Json trajectory_to_json(const Trajectory& traj, ImageStore& images) {
  Json turns = Json::array();
  for (const Turn& t : traj.turns) {
    turns.push_back({{"action", t.action.raw_text},
                     {"outcome", t.outcome ? outcome_to_json(*t.outcome) : Json(nullptr)},
                     {"image_after", image_ref_to_json(images.put(t.image_after))}});
  }
  return {{"schema", kTrajectorySchema},
          {"task_id", traj.task_id},
          {"turns", turns},
          {"final_answer", opt_string(traj.final_answer)},
          {"termination", traj.termination
                              ? Json(std::string(termination_name(*traj.termination)))
                              : Json(nullptr)}};
}

Trajectory trajectory_from_json(const Json& j, const ImageStore& images) {
  check_schema(j, kTrajectorySchema);
  Trajectory traj;
  traj.task_id = j.at("task_id").get<std::string>();
  for (const Json& t : j.at("turns")) {
    Turn turn;
    turn.action = AgentAction::parse(t.at("action").get<std::string>());
    turn.image_after = images.get(image_ref_from_json(t.at("image_after")));
    if (!t.at("outcome").is_null()) turn.outcome = outcome_from_json(t.at("outcome"), turn.image_after);
    if (turn.outcome.has_value() != (turn.action.kind == ActionKind::kCode)) {
      throw Error(ErrorCode::kCorruptRecord, "outcome present for a non-code action or missing");
    }
    traj.turns.push_back(std::move(turn));
  }
  traj.final_answer = opt_string_from(j, "final_answer");
  if (!j.at("termination").is_null()) {
    traj.termination = termination_from_name(j.at("termination").get<std::string>());
    if (!traj.termination) throw Error(ErrorCode::kCorruptRecord, "unknown termination");
  }
  return traj;
}

Json reward_to_json(const RewardBreakdown& b) {
  Json ledger = Json::array();
  for (const LedgerEntry& e : b.ledger) {
    ledger.push_back({{"tool", e.tool}, {"amount", e.amount}, {"turn", e.turn}});
  }
  return {{"r_acc", b.r_acc},
          {"r_fmt", b.r_fmt},
          {"must_use_total", b.must_use_total},
          {"ledger", ledger},
          {"traj_match", b.traj_match},
          {"nec_bonus", b.nec_bonus},
          {"opt_bonus", b.opt_bonus},
          {"penalties",
           {{"turn_limit", b.penalties.turn_limit},
            {"poor_reasoning", b.penalties.poor_reasoning},
            {"inappropriate_tool", b.penalties.inappropriate_tool}}},
          {"total", b.total},
          {"uses_optional", b.uses_optional},
          {"best_iou", b.best_iou}};
}

RewardBreakdown reward_from_json(const Json& j) {
  RewardBreakdown b;
  b.r_acc = j.at("r_acc").get<int>();
  b.r_fmt = j.at("r_fmt").get<int>();
  b.must_use_total = j.at("must_use_total").get<double>();
  for (const Json& e : j.at("ledger")) {
    b.ledger.push_back(LedgerEntry{e.at("tool").get<std::string>(), e.at("amount").get<double>(),
                                   e.at("turn").get<int>()});
  }
  b.traj_match = j.at("traj_match").get<double>();
  b.nec_bonus = j.at("nec_bonus").get<double>();
  b.opt_bonus = j.at("opt_bonus").get<double>();
  const Json& p = j.at("penalties");
  b.penalties = Penalties{p.at("turn_limit").get<int>(), p.at("poor_reasoning").get<int>(),
                          p.at("inappropriate_tool").get<int>()};
  b.total = j.at("total").get<double>();
  b.uses_optional = j.at("uses_optional").get<bool>();
  b.best_iou = j.at("best_iou").get<double>();
  return b;
}

std::string_view segment_role_name(SegmentRole role) {
  switch (role) {
    case SegmentRole::kUser: return "user";
    case SegmentRole::kAssistant: return "assistant";
    case SegmentRole::kToolReturn: return "tool-return";
  }
  return "";
}

std::optional<SegmentRole> segment_role_from_name(std::string_view name) {
  for (SegmentRole r : {SegmentRole::kUser, SegmentRole::kAssistant, SegmentRole::kToolReturn}) {
    if (segment_role_name(r) == name) return r;
  }
  return std::nullopt;
}

TrainingExample to_training_example(const Trajectory& traj, const TaskSpec& task,
                                    const ToolRegistry& registry) {
  if (!traj.terminated()) {
    throw Error(ErrorCode::kNotTerminated,
                "trajectory for task '" + traj.task_id + "' has not terminated");
  }
  TrainingExample ex;
  ex.task_id = traj.task_id;
  ex.final_answer = traj.final_answer;
  ex.segments.emplace_back(SegmentRole::kUser, render_prompt(task, registry));
  for (const Turn& t : traj.turns) {
    ex.segments.emplace_back(SegmentRole::kAssistant, t.action.raw_text);
    if (t.action.kind != ActionKind::kAnswer) {
      ex.segments.emplace_back(SegmentRole::kToolReturn, render_feedback(t));
    }
  }
  return ex;
}

double masked_fraction(const TrainingExample& ex) {
  std::size_t masked = 0;
  std::size_t total = 0;
  for (const TrainingSegment& s : ex.segments) {
    total += s.text().size();
    masked += s.mask() == 1 ? s.text().size() : 0;
  }
  return total == 0 ? 0.0 : static_cast<double>(masked) / static_cast<double>(total);
}

Json training_example_to_json(const TrainingExample& ex) {
  Json segs = Json::array();
  for (const TrainingSegment& s : ex.segments) {
    segs.push_back({{"role", std::string(segment_role_name(s.role()))},
                    {"text", s.text()},
                    {"mask", s.mask()}});
  }
  return {{"schema", kSftSchema},
          {"task_id", ex.task_id},
          {"segments", segs},
          {"final_answer", opt_string(ex.final_answer)}};
}

TrainingExample training_example_from_json(const Json& j) {
  check_schema(j, kSftSchema);
  TrainingExample ex;
  ex.task_id = j.at("task_id").get<std::string>();
  bool has_assistant = false;
  for (const Json& s : j.at("segments")) {
    const auto role = segment_role_from_name(s.at("role").get<std::string>());
    if (!role) throw Error(ErrorCode::kCorruptRecord, "unknown segment role");
    TrainingSegment seg(*role, s.at("text").get<std::string>());
    if (s.at("mask").get<int>() != seg.mask()) {
      throw Error(ErrorCode::kCorruptRecord, "segment mask contradicts its role '" +
                                                 std::string(segment_role_name(*role)) + "'");
    }
    has_assistant = has_assistant || *role == SegmentRole::kAssistant;
    ex.segments.push_back(std::move(seg));
  }
  if (!has_assistant) throw Error(ErrorCode::kCorruptRecord, "example has no assistant segment");
  ex.final_answer = opt_string_from(j, "final_answer");
  return ex;
}

std::string to_jsonl(const std::vector<Json>& records) {
  std::string out;
  for (const Json& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

void write_jsonl(const fs::path& path, const std::vector<Json>& records) {
  write_file_atomic(path, to_jsonl(records));
}

std::vector<Json> read_jsonl(const fs::path& path) {
  return read_records<Json>(path, [](const Json& j) { return j; });
}

void write_tasks(const fs::path& path, const std::vector<TaskSpec>& tasks) {
  ImageStore images(store_root(path));
  std::vector<Json> records;
  for (const TaskSpec& t : tasks) records.push_back(task_to_json(t, images));
  write_jsonl(path, records);
}

std::vector<TaskSpec> read_tasks(const fs::path& path) {
  const ImageStore images(store_root(path));
  return read_records<TaskSpec>(path, [&](const Json& j) { return task_from_json(j, images); });
}

void write_trajectories(const fs::path& path, const std::vector<TrajectoryRecord>& records) {
  ImageStore images(store_root(path));
  std::vector<Json> out;
  for (const TrajectoryRecord& r : records) {
    Json j = trajectory_to_json(r.trajectory, images);
    j["group"] = r.group;
    j["rollout"] = r.rollout;
    j["policy"] = r.policy;
    out.push_back(std::move(j));
  }
  write_jsonl(path, out);
}

std::vector<TrajectoryRecord> read_trajectories(const fs::path& path) {
  const ImageStore images(store_root(path));
  return read_records<TrajectoryRecord>(path, [&](const Json& j) {
    return TrajectoryRecord{j.at("group").get<std::string>(), j.at("rollout").get<int>(),
                            j.at("policy").get<std::string>(), trajectory_from_json(j, images)};
  });
}

void write_rewards(const fs::path& path, const std::vector<RewardRecord>& records) {
  std::vector<Json> out;
  for (const RewardRecord& r : records) {
    out.push_back({{"schema", kRewardSchema},
                   {"task_id", r.task_id},
                   {"group", r.group},
                   {"rollout", r.rollout},
                   {"group_finalized", r.group_finalized},
                   {"breakdown", reward_to_json(r.breakdown)}});
  }
  write_jsonl(path, out);
}

std::vector<RewardRecord> read_rewards(const fs::path& path) {
  return read_records<RewardRecord>(path, [](const Json& j) {
    check_schema(j, kRewardSchema);
    return RewardRecord{j.at("task_id").get<std::string>(), j.at("group").get<std::string>(),
                        j.at("rollout").get<int>(), j.at("group_finalized").get<bool>(),
                        reward_from_json(j.at("breakdown"))};
  });
}

void write_training_examples(const fs::path& path, const std::vector<TrainingExample>& examples) {
  std::vector<Json> out;
  for (const TrainingExample& ex : examples) out.push_back(training_example_to_json(ex));
  write_jsonl(path, out);
}

std::vector<TrainingExample> read_training_examples(const fs::path& path) {
  return read_records<TrainingExample>(path, training_example_from_json);
}

}  // namespace toolvis
