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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "toolvis/datagen.hpp"
#include "toolvis/kv.hpp"
#include "toolvis/policies.hpp"
#include "toolvis/ppm.hpp"
#include "toolvis/reward.hpp"
#include "toolvis/store.hpp"
#include "toolvis/verify.hpp"

namespace py = pybind11;
using namespace toolvis;

namespace {

using Box = std::tuple<int, int, int, int>;

BBox to_bbox(const Box& b) { return BBox{std::get<0>(b), std::get<1>(b), std::get<2>(b), std::get<3>(b)}; }
Box from_bbox(const BBox& b) { return {b.x0, b.y0, b.x1, b.y1}; }

template <typename T, typename F>
T lookup(std::string_view name, F from_name, const char* what) {
  if (const auto v = from_name(name)) return *v;
  throw Error(ErrorCode::kInvalidArgument, std::string("unknown ") + what + " '" + std::string(name) + "'");
}

TransformKind transform_arg(std::string_view name) {
  return lookup<TransformKind>(name, transform_from_name, "transform");
}

py::array_t<std::uint8_t> to_numpy(const Raster& img) {
  py::array_t<std::uint8_t> out({img.height(), img.width(), 3});
  std::copy(img.bytes().begin(), img.bytes().end(), out.mutable_data());
  return out;
}

Raster from_numpy(py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 3 || a.shape(2) != 3) {
    throw Error(ErrorCode::kInvalidArgument, "expected an array of shape (height, width, 3)");
  }
  const auto h = static_cast<int>(a.shape(0));
  const auto w = static_cast<int>(a.shape(1));
  if (w < 1 || h < 1) throw Error(ErrorCode::kInvalidArgument, "image must be non-empty");
  return Raster(w, h, std::vector<std::uint8_t>(a.data(), a.data() + a.size()));
}

py::object arg_to_py(const ArgValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return py::int_(*i);
  if (const auto* d = std::get_if<double>(&v)) return py::float_(*d);
  return py::str(std::get<std::string>(v));
}

std::vector<std::string> names_of(const std::vector<AppliedCall>& calls) {
  std::vector<std::string> out;
  for (const AppliedCall& c : calls) out.push_back(c.tool);
  return out;
}

py::dict outcome_dict(const ExecOutcome& o) {
  py::dict d;
  d["ok"] = o.ok();
  d["feedback"] = render_outcome(o);
  if (o.ok()) {
    d["image"] = o.success().result;
    d["applied"] = names_of(o.success().applied);
  } else {
    d["kind"] = std::string(exec_error_name(o.failure().kind));
    d["message"] = o.failure().message;
    d["line"] = o.failure().span.line;
    d["column"] = o.failure().span.column;
    d["applied"] = names_of(o.failure().applied_prefix);
  }
  return d;
}

py::dict breakdown_dict(const RewardBreakdown& b) {
  py::dict d;
  d["r_acc"] = b.r_acc;
  d["r_fmt"] = b.r_fmt;
  d["must_use_total"] = b.must_use_total;
  py::list ledger;
  for (const LedgerEntry& e : b.ledger) ledger.append(py::make_tuple(e.tool, e.amount, e.turn));
  d["ledger"] = ledger;
  d["traj_match"] = b.traj_match;
  d["nec_bonus"] = b.nec_bonus;
  d["opt_bonus"] = b.opt_bonus;
  d["turn_limit"] = b.penalties.turn_limit;
  d["poor_reasoning"] = b.penalties.poor_reasoning;
  d["inappropriate_tool"] = b.penalties.inappropriate_tool;
  d["total"] = b.total;
  d["best_iou"] = b.best_iou;
  return d;
}

RewardConfig reward_config(const std::string& kv) {
  return kv.empty() ? RewardConfig{} : RewardConfig::from_kv(KeyValues::from_arg(kv));
}

// Compact mode starts from the small-scene defaults; `kv` overrides either.
GenConfig gen_config(std::uint64_t seed, const std::string& kv, bool compact) {
  KeyValues merged;
  if (compact) {
    const GenConfig c = compact_gen_config(seed);
    merged.set("area_threshold", std::to_string(c.area_threshold));
    merged.set("scene_width", std::to_string(c.scene_width));
    merged.set("scene_height", std::to_string(c.scene_height));
    merged.set("scene_words", std::to_string(c.scene_words));
  }
  if (!kv.empty()) merged.merge(KeyValues::from_arg(kv));
  GenConfig cfg = GenConfig::from_kv(merged);
  cfg.rng_seed = seed;
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tool-program interpreter, episodes, rewards and data generation";

  static PyObject* error_type =
      PyErr_NewException("toolvis._core.ToolvisError", PyExc_RuntimeError, nullptr);
  m.attr("ToolvisError") = py::handle(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error_type)(std::string(e.what()));
      exc.attr("code") = std::string(error_code_name(e.code()));
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  py::class_<Raster>(m, "Raster")
      .def(py::init([](int w, int h, std::tuple<std::uint8_t, std::uint8_t, std::uint8_t> fill) {
             if (w < 1 || h < 1) throw Error(ErrorCode::kInvalidArgument, "image must be non-empty");
             return Raster(w, h, Rgb{std::get<0>(fill), std::get<1>(fill), std::get<2>(fill)});
           }),
           py::arg("width"), py::arg("height"), py::arg("fill") = std::make_tuple(0, 0, 0))
      .def_static("from_numpy", &from_numpy)
      .def("to_numpy", &to_numpy)
      .def_property_readonly("width", &Raster::width)
      .def_property_readonly("height", &Raster::height)
      .def("pixel", [](const Raster& r, int x, int y) {
        if (x < 0 || y < 0 || x >= r.width() || y >= r.height()) throw py::index_error("pixel out of range");
        const Rgb c = r.at(x, y);
        return py::make_tuple(c.r, c.g, c.b);
      })
      .def("__eq__", [](const Raster& a, const Raster& b) { return a == b; })
      .def("__repr__", [](const Raster& r) {
        return "<Raster " + std::to_string(r.width()) + "x" + std::to_string(r.height()) + ">";
      });


  m.def("transforms", [] {
    std::vector<std::string> out;
    for (TransformKind k : kAllTransforms) out.emplace_back(transform_name(k));
    return out;
  });
  m.def("apply_transform", [](const Raster& img, const std::string& kind) {
    return apply_transform(img, transform_arg(kind));
  });
  m.def("inverse", [](const std::string& kind) { return std::string(transform_name(inverse(transform_arg(kind)))); });
  m.def("detect_transform", [](const Raster& canonical, const Raster& observed) {
    std::vector<std::string> out;
    for (TransformKind k : detect_transform(canonical, observed)) out.emplace_back(transform_name(k));
    return out;
  });
  m.def("crop", [](const Raster& img, const Box& box, bool strict) {
    return crop(img, to_bbox(box), strict ? CropMode::kStrict : CropMode::kClip);
  }, py::arg("img"), py::arg("box"), py::arg("strict") = true);
  m.def("iou", [](const Box& a, const Box& b) { return iou(to_bbox(a), to_bbox(b)); });
  m.def("adjust_brightness", &adjust_brightness);
  m.def("adjust_contrast", &adjust_contrast);
  m.def("to_grayscale", &to_grayscale);
  m.def("box_blur", &box_blur);
  m.def("sharpen", &sharpen);
  m.def("edge_detect", &edge_detect);
  m.def("encode_ppm", [](const Raster& img) { return py::bytes(encode_ppm(img)); });
  m.def("decode_ppm", [](const py::bytes& b) { return decode_ppm(std::string(b)); });

  m.def("tool_names", [] { return ToolRegistry::builtin().names(); });
  m.def("describe_tools", [] { return ToolRegistry::builtin().describe(); });
  m.def("parse", [](const std::string& src) {
    py::list calls;
    for (const ToolCall& c : parse(src).calls) {
      py::dict args;
      for (const Arg& a : c.args) args[py::str(a.name)] = arg_to_py(a.value);
      calls.append(py::make_tuple(c.tool, args));
    }
    return calls;
  });
  m.def("normalize_program", [](const std::string& src) { return render(parse(src)); });
  m.def("execute", [](const std::string& src, const Raster& img, bool strict) {
    return outcome_dict(execute(src, img, ToolRegistry::builtin(),
                                ExecOptions{strict ? CropMode::kStrict : CropMode::kClip}));
  }, py::arg("program"), py::arg("img"), py::arg("strict") = false);

  py::class_<TaskSpec, std::shared_ptr<TaskSpec>>(m, "TaskSpec")
      .def_readonly("id", &TaskSpec::id)
      .def_readonly("question", &TaskSpec::question)
      .def_readonly("gold_answer", &TaskSpec::gold_answer)
      .def_readonly("initial_image", &TaskSpec::initial_image)
      .def_readonly("canonical_image", &TaskSpec::canonical_image)
      .def_readonly("max_turns", &TaskSpec::max_turns)
      .def_readonly("scripted_fault", &TaskSpec::scripted_fault)
      .def_property_readonly("task_type", [](const TaskSpec& t) { return std::string(task_type_name(t.task_type)); })
      .def_property_readonly("s_req", [](const TaskSpec& t) {
        std::vector<std::string> out;
        for (ToolId id : t.s_req) out.emplace_back(tool_name(id));
        return out;
      })
      .def_property_readonly("target_box", [](const TaskSpec& t) -> std::optional<Box> {
        if (!t.target_box) return std::nullopt;
        return from_bbox(*t.target_box);
      })
      .def("__repr__", [](const TaskSpec& t) { return "<TaskSpec " + t.id + ">"; });

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("task_id", &Trajectory::task_id)
      .def_readonly("final_answer", &Trajectory::final_answer)
      .def_property_readonly("termination", [](const Trajectory& t) -> std::optional<std::string> {
        if (!t.termination) return std::nullopt;
        return std::string(termination_name(*t.termination));
      })
      .def_property_readonly("code_turns", &Trajectory::code_turns)
      .def_property_readonly("actions", [](const Trajectory& t) {
        std::vector<std::string> out;
        for (const Turn& turn : t.turns) out.push_back(turn.action.raw_text);
        return out;
      })
      .def_property_readonly("feedback", [](const Trajectory& t) {
        std::vector<std::string> out;
        for (const Turn& turn : t.turns) out.push_back(render_feedback(turn));
        return out;
      });

  py::class_<Episode>(m, "Episode")
      .def("step", [](Episode& ep, const std::string& text) {
        const StepResult r = ep.step(text);
        return py::make_tuple(r.feedback, r.image, r.done);
      })
      .def("abort", &Episode::abort)
      .def_property_readonly("done", &Episode::done)
      .def_property_readonly("image", &Episode::image)
      .def_property_readonly("trajectory", &Episode::trajectory);

  py::class_<Environment>(m, "Environment")
      .def(py::init<>())
      .def("reset", [](const Environment& env, std::shared_ptr<TaskSpec> task) {
        return env.reset(std::shared_ptr<const TaskSpec>(task));
      })
      .def("prompt", [](const Environment& env, const TaskSpec& task) {
        return render_prompt(task, env.registry());
      });

  m.def("gen_tasks", [](int n, std::uint64_t seed, const std::string& config, bool compact) {
    std::vector<std::shared_ptr<TaskSpec>> out;
    for (TaskSpec& t : gen_tasks(gen_config(seed, config, compact), n)) {
      out.push_back(std::make_shared<TaskSpec>(std::move(t)));
    }
    return out;
  }, py::arg("n"), py::arg("seed") = 0, py::arg("config") = "", py::arg("compact") = true);

  m.def("policy_names", [] {
    std::vector<std::string> out;
    for (PolicyKind k : {PolicyKind::kOracle, PolicyKind::kTrialAndError, PolicyKind::kRewardHacker,
                         PolicyKind::kClumsy, PolicyKind::kRandom}) {
      out.emplace_back(policy_kind_name(k));
    }
    return out;
  });
  m.def("run_policy", [](std::shared_ptr<TaskSpec> task, const std::string& policy, std::uint64_t seed) {
    const PolicyKind kind = lookup<PolicyKind>(policy, policy_kind_from_name, "policy");
    return run_episode(Environment{}, PolicySpec{kind, seed, std::nullopt, false},
                       std::shared_ptr<const TaskSpec>(task));
  }, py::arg("task"), py::arg("policy"), py::arg("seed") = 0);
  m.def("score", [](const Trajectory& traj, const TaskSpec& task, const std::string& config) {
    return breakdown_dict(score_trajectory(traj, task, reward_config(config)));
  }, py::arg("trajectory"), py::arg("task"), py::arg("config") = "");
  m.def("necessity_reward", [](const std::vector<int>& r_acc, const std::vector<bool>& uses_optional) {
    GroupStats g;
    g.group_k = static_cast<int>(r_acc.size());
    g.r_acc = r_acc;
    g.uses_optional = uses_optional;
    return necessity_reward(g);
  });
  m.def("difficulty_filter", &difficulty_filter);

  m.def("write_tasks", [](const std::filesystem::path& path, const std::vector<std::shared_ptr<TaskSpec>>& tasks) {
    std::vector<TaskSpec> plain;
    for (const auto& t : tasks) plain.push_back(*t);
    write_tasks(path, plain);
  });
  m.def("read_tasks", [](const std::filesystem::path& path) {
    std::vector<std::shared_ptr<TaskSpec>> out;
    for (TaskSpec& t : read_tasks(path)) out.push_back(std::make_shared<TaskSpec>(std::move(t)));
    return out;
  });
  m.def("sha256_hex", [](const py::bytes& b) { return sha256_hex(std::string(b)); });

  m.def("run_self_checks", [](std::uint64_t seed, const std::filesystem::path& scratch) {
    std::vector<std::tuple<std::string, bool, std::string>> out;
    for (const CheckResult& r : run_self_checks(seed, scratch)) out.emplace_back(r.name, r.passed, r.detail);
    return out;
  });
}
