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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "toolvis/toolprog.hpp"

namespace toolvis {
namespace {

std::string type_name(ArgType t) {
  switch (t) {
    case ArgType::kInt: return "int";
    case ArgType::kNumber: return "number";
    case ArgType::kString: return "string";
  }
  return "";
}

int to_pixel(double v) {
  return static_cast<int>(std::clamp(std::round(v), -1e9, 1e9));
}

// Absolute pixel coordinates for a crop call. If every coordinate is a
// fractional literal in [0, 1], the box is relative to the image size.
BBox crop_box(const Raster& img, const ResolvedArgs& args) {
  static constexpr const char* kNames[4] = {"x0", "y0", "x1", "y1"};
  bool relative = true;
  for (const char* n : kNames) {
    const auto* d = std::get_if<double>(&args.get(n));
    if (d == nullptr || *d < 0.0 || *d > 1.0) relative = false;
  }
  int v[4];
  for (int i = 0; i < 4; ++i) {
    const ArgValue& a = args.get(kNames[i]);
    if (relative) {
      const int extent = (i % 2 == 0) ? img.width() : img.height();
      v[i] = to_pixel(std::get<double>(a) * extent);
    } else if (const auto* d = std::get_if<double>(&a)) {
      v[i] = to_pixel(*d);
    } else {
      v[i] = static_cast<int>(std::clamp<std::int64_t>(std::get<std::int64_t>(a), -1'000'000'000,
                                                       1'000'000'000));
    }
  }
  return BBox{v[0], v[1], v[2], v[3]};
}

ToolDef orientation_tool(ToolId id, const char* doc) {
  const TransformKind kind = *transform_for_tool(id);
  return ToolDef{std::string(tool_name(id)), {}, doc, ToolCategory::kOrientation, kind,
                 [kind](const Raster& img, const ResolvedArgs&, const ExecOptions&) {
                   return ToolResult{apply_transform(img, kind), std::nullopt};
                 }};
}

ToolDef enhancement_tool(ToolId id, std::vector<ArgSpec> args, const char* doc) {
  return ToolDef{std::string(tool_name(id)), std::move(args), doc, ToolCategory::kEnhancement,
                 std::nullopt,
                 [id](const Raster& img, const ResolvedArgs& a, const ExecOptions&) {
                   EnhanceParams p;
                   if (a.has("factor")) p.factor = a.get_number("factor");
                   if (a.has("radius")) p.radius = static_cast<int>(std::clamp<std::int64_t>(
                                            a.get_int("radius"), -1, 1'000'000));
                   return ToolResult{enhance(img, id, p), std::nullopt};
                 }};
}

std::optional<std::string> check_args(const ToolCall& call, const ToolDef& def,
                                      std::map<std::string, ArgValue, std::less<>>& out) {
  const std::string& tool = def.name;
  for (const Arg& a : call.args) {
    const auto spec = std::find_if(def.args.begin(), def.args.end(),
                                   [&](const ArgSpec& s) { return s.name == a.name; });
    if (spec == def.args.end()) {
      return tool + ": unexpected argument '" + a.name + "'";
    }
  }
  for (const ArgSpec& s : def.args) {
    if (s.required && call.find(s.name) == nullptr) {
      return tool + ": missing required argument '" + s.name + "'";
    }
  }
  for (const ArgSpec& s : def.args) {
    const ArgValue* v = call.find(s.name);
    if (v == nullptr) {
      if (s.default_value) out.emplace(s.name, *s.default_value);
      continue;
    }
    bool ok = false;
    switch (s.type) {
      case ArgType::kInt:
        ok = std::holds_alternative<std::int64_t>(*v) ||
             (s.accepts_fraction && std::holds_alternative<double>(*v));
        break;
      case ArgType::kNumber:
        ok = !std::holds_alternative<std::string>(*v);
        break;
      case ArgType::kString:
        ok = std::holds_alternative<std::string>(*v);
        break;
    }
    if (!ok) {
      const char* expected = s.type == ArgType::kInt      ? "an integer"
                             : s.type == ArgType::kNumber ? "a number"
                                                          : "a string";
      return tool + ": argument '" + s.name + "' must be " + expected + ", got " +
             render_value(*v);
    }
    out.emplace(s.name, *v);
  }
  return std::nullopt;
}

std::string join_applied(const std::vector<AppliedCall>& applied) {
  std::string out;
  for (std::size_t i = 0; i < applied.size(); ++i) {
    if (i > 0) out += ", ";
    out += applied[i].tool;
  }
  return out;
}

}  // namespace

const ArgValue& ResolvedArgs::get(std::string_view name) const {
  const auto it = values_.find(name);
  if (it == values_.end()) {
    throw Error(ErrorCode::kInvalidArgument, "missing argument '" + std::string(name) + "'");
  }
  return it->second;
}

std::int64_t ResolvedArgs::get_int(std::string_view name) const {
  const ArgValue& v = get(name);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw Error(ErrorCode::kBadParam, "argument '" + std::string(name) + "' is not an integer");
}

double ResolvedArgs::get_number(std::string_view name) const {
  const ArgValue& v = get(name);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw Error(ErrorCode::kBadParam, "argument '" + std::string(name) + "' is not a number");
}

const std::string& ResolvedArgs::get_string(std::string_view name) const {
  const ArgValue& v = get(name);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw Error(ErrorCode::kBadParam, "argument '" + std::string(name) + "' is not a string");
}

ToolRegistry ToolRegistry::builtin() {
  ToolRegistry reg;
  reg.add(orientation_tool(ToolId::kRotate90, "rotate 90 degrees clockwise"));
  reg.add(orientation_tool(ToolId::kRotate180, "rotate 180 degrees"));
  reg.add(orientation_tool(ToolId::kRotate270, "rotate 90 degrees counter-clockwise"));
  reg.add(orientation_tool(ToolId::kFlipHorizontal, "mirror left-right"));
  reg.add(orientation_tool(ToolId::kFlipVertical, "mirror top-bottom"));

  std::vector<ArgSpec> coords;
  for (const char* n : {"x0", "y0", "x1", "y1"}) {
    coords.push_back(ArgSpec{n, ArgType::kInt, true, std::nullopt, true});
  }
  reg.add(ToolDef{"crop", coords,
                  "cut out the box [x0,x1) x [y0,y1); fractions in [0,1] are relative",
                  ToolCategory::kCrop, std::nullopt,
                  [](const Raster& img, const ResolvedArgs& a, const ExecOptions& opt) {
                    const BBox region =
                        resolve_crop_box(crop_box(img, a), img.width(), img.height(),
                                         opt.crop_mode);
                    return ToolResult{crop(img, region, CropMode::kStrict), region};
                  }});

  reg.add(enhancement_tool(ToolId::kBrightness,
                           {ArgSpec{"factor", ArgType::kNumber, false, kDefaultBrightness}},
                           "multiply channels by factor (> 0)"));
  reg.add(enhancement_tool(ToolId::kContrast,
                           {ArgSpec{"factor", ArgType::kNumber, false, kDefaultContrast}},
                           "scale channels around 128 by factor (> 0)"));
  reg.add(enhancement_tool(ToolId::kGrayscale, {}, "convert to luma"));
  reg.add(enhancement_tool(
      ToolId::kBlur,
      {ArgSpec{"radius", ArgType::kInt, false, std::int64_t{kDefaultBlurRadius}}},
      "box blur with integer radius >= 1"));
  reg.add(enhancement_tool(ToolId::kSharpen, {}, "unsharp mask, radius 1"));
  reg.add(enhancement_tool(ToolId::kEdgeDetect, {}, "Sobel gradient magnitude of luma"));
  return reg;
}

void ToolRegistry::add(ToolDef def) {
  def.name = canonical_tool_name(def.name);
  if (def.name.empty() || def.name[0] < 'a' || def.name[0] > 'z' ||
      !std::all_of(def.name.begin(), def.name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
      })) {
    throw Error(ErrorCode::kInvalidArgument, "invalid tool name '" + def.name + "'");
  }
  if (!def.handler) {
    throw Error(ErrorCode::kInvalidArgument, "tool '" + def.name + "' has no handler");
  }
  if (def.category == ToolCategory::kOrientation && !def.orientation) {
    throw Error(ErrorCode::kInvalidArgument,
                "orientation tool '" + def.name + "' must declare its transform");
  }
  if (find(def.name) != nullptr) {
    throw Error(ErrorCode::kDuplicateTool, "tool '" + def.name + "' is already registered");
  }
  tools_.push_back(std::move(def));
}

const ToolDef* ToolRegistry::find(std::string_view name) const {
  const std::string canonical = canonical_tool_name(name);
  for (const ToolDef& d : tools_) {
    if (d.name == canonical) return &d;
  }
  return nullptr;
}

std::vector<std::string> ToolRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(tools_.size());
  for (const ToolDef& d : tools_) out.push_back(d.name);
  return out;
}

std::string signature(const ToolDef& def) {
  std::string out = def.name + "(";
  for (std::size_t i = 0; i < def.args.size(); ++i) {
    const ArgSpec& a = def.args[i];
    if (i > 0) out += ", ";
    out += a.name + ": " + type_name(a.type);
    if (!a.required && a.default_value) out += " = " + render_value(*a.default_value);
  }
  return out + ")";
}

std::string ToolRegistry::describe() const {
  std::string out;
  for (const ToolDef& d : tools_) out += signature(d) + " - " + d.doc + "\n";
  return out;
}

std::string_view exec_error_name(ExecErrorKind kind) {
  switch (kind) {
    case ExecErrorKind::kParseError: return "ParseError";
    case ExecErrorKind::kUnknownTool: return "UnknownTool";
    case ExecErrorKind::kBadArgs: return "BadArgs";
    case ExecErrorKind::kRuntimeError: return "RuntimeError";
  }
  return "";
}

std::optional<ExecErrorKind> exec_error_from_name(std::string_view name) {
  for (auto k : {ExecErrorKind::kParseError, ExecErrorKind::kUnknownTool,
                 ExecErrorKind::kBadArgs, ExecErrorKind::kRuntimeError}) {
    if (exec_error_name(k) == name) return k;
  }
  return std::nullopt;
}

ExecOutcome execute(const ToolProgram& program, const Raster& img, const ToolRegistry& registry,
                    const ExecOptions& options) {
  Raster current = img;
  std::vector<AppliedCall> applied;
  std::ostringstream log;
  for (const ToolCall& call : program.calls) {
    const ToolDef* def = registry.find(call.tool);
    if (def == nullptr) {
      std::string names;
      for (const std::string& n : registry.names()) names += (names.empty() ? "" : ", ") + n;
      return ExecFailure{ExecErrorKind::kUnknownTool,
                         "unknown tool '" + call.tool + "'; registered tools: " + names,
                         call.span, applied};
    }
    std::map<std::string, ArgValue, std::less<>> resolved;
    if (auto problem = check_args(call, *def, resolved)) {
      return ExecFailure{ExecErrorKind::kBadArgs, *problem, call.span, applied};
    }
    ToolResult result;
    try {
      result = def->handler(current, ResolvedArgs(std::move(resolved)), options);
    } catch (const Error& e) {
      std::string message = e.what();
      if (message.rfind(def->name + ":", 0) != 0) message = def->name + ": " + message;
      const ExecErrorKind kind = e.code() == ErrorCode::kBadParam ? ExecErrorKind::kBadArgs
                                                                   : ExecErrorKind::kRuntimeError;
      return ExecFailure{kind, message, call.span, applied};
    }
    if (def->category == ToolCategory::kCrop && !result.region) {
      return ExecFailure{ExecErrorKind::kRuntimeError,
                         def->name + ": crop tool did not report its region", call.span,
                         applied};
    }
    if (def->category != ToolCategory::kCrop && def->category != ToolCategory::kOrientation &&
        (result.image.width() != current.width() || result.image.height() != current.height())) {
      return ExecFailure{ExecErrorKind::kRuntimeError,
                         def->name + ": tool changed the image dimensions", call.span, applied};
    }
    log << def->name << ": " << current.width() << "x" << current.height() << " -> "
        << result.image.width() << "x" << result.image.height() << "\n";
    applied.push_back(AppliedCall{def->name, result.region, def->orientation});
    current = std::move(result.image);
  }
  return ExecSuccess{std::move(current), std::move(applied), log.str()};
}

ExecOutcome execute(std::string_view source, const Raster& img, const ToolRegistry& registry,
                    const ExecOptions& options) {
  ToolProgram program;
  try {
    program = parse(source);
  } catch (const ParseError& e) {
    return ExecFailure{ExecErrorKind::kParseError, e.what(), e.span(), {}};
  }
  return execute(program, img, registry, options);
}

std::string render_outcome(const ExecOutcome& outcome) {
  if (outcome.ok()) return "EXEC OK applied=[" + join_applied(outcome.success().applied) + "]";
  const ExecFailure& f = outcome.failure();
  return "EXEC ERROR " + std::string(exec_error_name(f.kind)) + ": " + f.message + " at " +
         std::to_string(f.span.line) + ":" + std::to_string(f.span.column);
}

}  // namespace toolvis
