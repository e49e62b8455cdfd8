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

#ifndef TOOLVIS_TOOL_ID_HPP_
#define TOOLVIS_TOOL_ID_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "toolvis/geometry.hpp"

namespace toolvis {

enum class ToolId : std::uint8_t {
  kRotate90,
  kRotate180,
  kRotate270,
  kFlipHorizontal,
  kFlipVertical,
  kCrop,
  kBrightness,
  kContrast,
  kGrayscale,
  kBlur,
  kSharpen,
  kEdgeDetect,
};

enum class ToolCategory : std::uint8_t { kOrientation, kCrop, kEnhancement };

inline constexpr std::array<ToolId, 12> kBuiltinTools = {
    ToolId::kRotate90,   ToolId::kRotate180,    ToolId::kRotate270,
    ToolId::kFlipHorizontal, ToolId::kFlipVertical, ToolId::kCrop,
    ToolId::kBrightness, ToolId::kContrast,     ToolId::kGrayscale,
    ToolId::kBlur,       ToolId::kSharpen,      ToolId::kEdgeDetect};

// The must-use vocabulary, in the order it is usually listed.
inline constexpr std::array<ToolId, 6> kMustUseTools = {
    ToolId::kRotate90,       ToolId::kRotate180,    ToolId::kRotate270,
    ToolId::kFlipHorizontal, ToolId::kFlipVertical, ToolId::kCrop};

inline constexpr std::array<ToolId, 5> kOrientationTools = {
    ToolId::kRotate90, ToolId::kRotate180, ToolId::kRotate270,
    ToolId::kFlipHorizontal, ToolId::kFlipVertical};

inline constexpr std::array<ToolId, 6> kEnhancementTools = {
    ToolId::kBrightness, ToolId::kContrast, ToolId::kGrayscale,
    ToolId::kBlur,       ToolId::kSharpen,  ToolId::kEdgeDetect};

// Canonical hyphenated name, e.g. "flip-horizontal".
std::string_view tool_name(ToolId id);

// Accepts canonical names and underscore aliases ("flip_horizontal").
std::optional<ToolId> tool_from_name(std::string_view name);

// Maps underscores to hyphens.
std::string canonical_tool_name(std::string_view name);

ToolCategory category(ToolId id);

// Orientation tool for a transform, nullopt for kIdentity.
std::optional<ToolId> tool_for_transform(TransformKind kind);
std::optional<TransformKind> transform_for_tool(ToolId id);

}  // namespace toolvis

#endif  // TOOLVIS_TOOL_ID_HPP_
