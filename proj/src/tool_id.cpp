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

#include "toolvis/tool_id.hpp"

#include <algorithm>

#include "toolvis/error.hpp"

namespace toolvis {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kEmptyRegion: return "EmptyRegion";
    case ErrorCode::kBadParam: return "BadParam";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDuplicateTool: return "DuplicateTool";
    case ErrorCode::kInvalidTask: return "InvalidTask";
    case ErrorCode::kEpisodeTerminated: return "EpisodeTerminated";
    case ErrorCode::kNotTerminated: return "NotTerminated";
    case ErrorCode::kNoRequirement: return "NoRequirement";
    case ErrorCode::kIncompleteGroup: return "IncompleteGroup";
    case ErrorCode::kOverflow: return "Overflow";
    case ErrorCode::kNoCandidate: return "NoCandidate";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kCorruptRecord: return "CorruptRecord";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

std::string_view tool_name(ToolId id) {
  switch (id) {
    case ToolId::kRotate90: return "rotate90";
    case ToolId::kRotate180: return "rotate180";
    case ToolId::kRotate270: return "rotate270";
    case ToolId::kFlipHorizontal: return "flip-horizontal";
    case ToolId::kFlipVertical: return "flip-vertical";
    case ToolId::kCrop: return "crop";
    case ToolId::kBrightness: return "brightness";
    case ToolId::kContrast: return "contrast";
    case ToolId::kGrayscale: return "grayscale";
    case ToolId::kBlur: return "blur";
    case ToolId::kSharpen: return "sharpen";
    case ToolId::kEdgeDetect: return "edge-detect";
  }
  return "";
}

std::string canonical_tool_name(std::string_view name) {
  std::string out(name);
  std::replace(out.begin(), out.end(), '_', '-');
  return out;
}

std::optional<ToolId> tool_from_name(std::string_view name) {
  const std::string canonical = canonical_tool_name(name);
  for (ToolId id : kBuiltinTools) {
    if (tool_name(id) == canonical) return id;
  }
  return std::nullopt;
}

ToolCategory category(ToolId id) {
  switch (id) {
    case ToolId::kRotate90:
    case ToolId::kRotate180:
    case ToolId::kRotate270:
    case ToolId::kFlipHorizontal:
    case ToolId::kFlipVertical:
      return ToolCategory::kOrientation;
    case ToolId::kCrop:
      return ToolCategory::kCrop;
    default:
      return ToolCategory::kEnhancement;
  }
}

std::optional<ToolId> tool_for_transform(TransformKind kind) {
  switch (kind) {
    case TransformKind::kRot90: return ToolId::kRotate90;
    case TransformKind::kRot180: return ToolId::kRotate180;
    case TransformKind::kRot270: return ToolId::kRotate270;
    case TransformKind::kFlipH: return ToolId::kFlipHorizontal;
    case TransformKind::kFlipV: return ToolId::kFlipVertical;
    case TransformKind::kIdentity: return std::nullopt;
  }
  return std::nullopt;
}

std::optional<TransformKind> transform_for_tool(ToolId id) {
  switch (id) {
    case ToolId::kRotate90: return TransformKind::kRot90;
    case ToolId::kRotate180: return TransformKind::kRot180;
    case ToolId::kRotate270: return TransformKind::kRot270;
    case ToolId::kFlipHorizontal: return TransformKind::kFlipH;
    case ToolId::kFlipVertical: return TransformKind::kFlipV;
    default: return std::nullopt;
  }
}

}  // namespace toolvis
