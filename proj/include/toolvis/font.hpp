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

#ifndef TOOLVIS_FONT_HPP_
#define TOOLVIS_FONT_HPP_

#include <array>
#include <cstdint>
#include <string_view>

#include "toolvis/raster.hpp"

namespace toolvis {

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;
// Horizontal advance per character, in glyph pixels (one column gap).
inline constexpr int kGlyphAdvance = 6;

// Rows of a 5x7 glyph, bit 4 = leftmost column. Covers A-Z, a-z and 0-9;
// every other character renders blank.
const std::array<std::uint8_t, kGlyphHeight>& glyph(char c);
bool has_glyph(char c);

// Width in pixels of `text` at `scale` (no trailing gap).
int text_width(std::string_view text, int scale);
inline int text_height(int scale) { return kGlyphHeight * scale; }

void draw_text(Canvas& canvas, int x, int y, std::string_view text, int scale, Rgb ink);

}  // namespace toolvis

#endif  // TOOLVIS_FONT_HPP_
