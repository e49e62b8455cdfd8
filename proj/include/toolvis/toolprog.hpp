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

// Tool programs: a pipeline of tool calls, e.g.
//
//   crop(x0=10, y0=20, x1=50, y1=80) | grayscale()
//
// Grammar (a newline is equivalent to "|"):
//
//   program := call (ws* "|" ws* call)*
//   call    := IDENT "(" arglist? ")"
//   arglist := arg ("," ws* arg)*
//   arg     := IDENT "=" (INT | FLOAT | DQSTRING)
//   IDENT   := [a-z][a-z0-9-]*   (underscores accepted as aliases of "-")

#ifndef TOOLVIS_TOOLPROG_HPP_
#define TOOLVIS_TOOLPROG_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "toolvis/error.hpp"
#include "toolvis/raster.hpp"

namespace toolvis {

using ArgValue = std::variant<std::int64_t, double, std::string>;

// Byte range in the program text plus the 1-based position of its start.
struct SourceSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
  int line = 1;
  int column = 1;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

struct Arg {
  std::string name;
  ArgValue value;

  friend bool operator==(const Arg&, const Arg&) = default;
};

struct ToolCall {
  std::string tool;  // canonical (hyphenated) name
  std::vector<Arg> args;
  SourceSpan span;

  const ArgValue* find(std::string_view name) const;

  // Spans are provenance, not meaning; they do not take part in equality.
  friend bool operator==(const ToolCall& a, const ToolCall& b) {
    return a.tool == b.tool && a.args == b.args;
  }
};

struct ToolProgram {
  std::vector<ToolCall> calls;

  friend bool operator==(const ToolProgram&, const ToolProgram&) = default;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, SourceSpan span, std::string token)
      : Error(ErrorCode::kParseError, message), span_(span), token_(std::move(token)) {}

  const SourceSpan& span() const { return span_; }
  // The offending token as it appears in the message.
  const std::string& token() const { return token_; }

 private:
  SourceSpan span_;
  std::string token_;
};

// Throws ParseError.
ToolProgram parse(std::string_view source);

std::string render(const ToolProgram& program);
std::string render_value(const ArgValue& value);

enum class ArgType { kInt, kNumber, kString };

struct ArgSpec {
  std::string name;
  ArgType type = ArgType::kInt;
  bool required = false;
  std::optional<ArgValue> default_value;
  // kInt arguments that also take fractional coordinates (crop).
  bool accepts_fraction = false;
};

// Arguments of one call after schema checking, defaults filled in.
class ResolvedArgs {
 public:
  explicit ResolvedArgs(std::map<std::string, ArgValue, std::less<>> values)
      : values_(std::move(values)) {}

  bool has(std::string_view name) const { return values_.find(name) != values_.end(); }
  const ArgValue& get(std::string_view name) const;
  std::int64_t get_int(std::string_view name) const;
  double get_number(std::string_view name) const;
  const std::string& get_string(std::string_view name) const;

 private:
  std::map<std::string, ArgValue, std::less<>> values_;
};

struct ExecOptions {
  // Clip mode lets near-miss crops still produce output.
  CropMode crop_mode = CropMode::kClip;
};

struct ToolResult {
  Raster image;
  // Region of the input that was cut out (crop tools only).
  std::optional<BBox> region;
};

using ToolHandler =
    std::function<ToolResult(const Raster&, const ResolvedArgs&, const ExecOptions&)>;

struct ToolDef {
  std::string name;
  std::vector<ArgSpec> args;
  std::string doc;
  ToolCategory category = ToolCategory::kEnhancement;
  // Required for orientation tools; drives coordinate tracking.
  std::optional<TransformKind> orientation;
  ToolHandler handler;
};

class ToolRegistry {
 public:
  ToolRegistry() = default;

  // Orientation, crop and enhancement tools in the canonical order.
  static ToolRegistry builtin();

  // Throws Error(kDuplicateTool) if the canonical name is taken and
  // kInvalidArgument for malformed definitions.
  void add(ToolDef def);

  // Accepts underscore aliases.
  const ToolDef* find(std::string_view name) const;
  const std::vector<ToolDef>& tools() const { return tools_; }
  std::vector<std::string> names() const;

  // One line per tool: signature and doc, e.g.
  // "crop(x0: int, y0: int, x1: int, y1: int) - cut out a region".
  std::string describe() const;

 private:
  std::vector<ToolDef> tools_;
};

std::string signature(const ToolDef& def);

enum class ExecErrorKind { kParseError, kUnknownTool, kBadArgs, kRuntimeError };

std::string_view exec_error_name(ExecErrorKind kind);
std::optional<ExecErrorKind> exec_error_from_name(std::string_view name);

struct AppliedCall {
  std::string tool;
  std::optional<BBox> region;               // crop region in its input's coordinates
  std::optional<TransformKind> orientation;  // set for orientation tools

  friend bool operator==(const AppliedCall&, const AppliedCall&) = default;
};

struct ExecSuccess {
  Raster result;
  std::vector<AppliedCall> applied;
  std::string log;

  friend bool operator==(const ExecSuccess&, const ExecSuccess&) = default;
};

struct ExecFailure {
  ExecErrorKind kind = ExecErrorKind::kRuntimeError;
  std::string message;
  SourceSpan span;
  std::vector<AppliedCall> applied_prefix;

  friend bool operator==(const ExecFailure&, const ExecFailure&) = default;
};

class ExecOutcome {
 public:
  ExecOutcome(ExecSuccess s) : value_(std::move(s)) {}
  ExecOutcome(ExecFailure f) : value_(std::move(f)) {}

  bool ok() const { return std::holds_alternative<ExecSuccess>(value_); }
  const ExecSuccess& success() const { return std::get<ExecSuccess>(value_); }
  const ExecFailure& failure() const { return std::get<ExecFailure>(value_); }

  friend bool operator==(const ExecOutcome&, const ExecOutcome&) = default;

 private:
  std::variant<ExecSuccess, ExecFailure> value_;
};

ExecOutcome execute(const ToolProgram& program, const Raster& img, const ToolRegistry& registry,
                    const ExecOptions& options = {});

// Parses first; a ParseError becomes a failure outcome.
ExecOutcome execute(std::string_view source, const Raster& img, const ToolRegistry& registry,
                    const ExecOptions& options = {});

// "EXEC OK applied=[a, b]" or "EXEC ERROR <kind>: <message> at <line>:<col>".
std::string render_outcome(const ExecOutcome& outcome);

}  // namespace toolvis

#endif  // TOOLVIS_TOOLPROG_HPP_
