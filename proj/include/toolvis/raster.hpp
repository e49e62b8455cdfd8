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

#ifndef TOOLVIS_RASTER_HPP_
#define TOOLVIS_RASTER_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toolvis/geometry.hpp"
#include "toolvis/tool_id.hpp"

namespace toolvis {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Immutable RGB8 image. Pixel storage is shared between copies, so passing
// rasters by value is cheap.
class Raster {
 public:
  // 1x1 black.
  Raster();
  Raster(int width, int height, Rgb fill);
  // `bytes` is row-major RGB, exactly width*height*3 long.
  Raster(int width, int height, std::vector<std::uint8_t> bytes);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  BBox bounds() const { return BBox{0, 0, width_, height_}; }

  Rgb at(int x, int y) const {
    const std::uint8_t* p = data_->data() + (static_cast<std::size_t>(y) * width_ + x) * 3;
    return Rgb{p[0], p[1], p[2]};
  }
  std::span<const std::uint8_t> bytes() const { return *data_; }

  friend bool operator==(const Raster& a, const Raster& b);

 private:
  int width_;
  int height_;
  std::shared_ptr<const std::vector<std::uint8_t>> data_;
};

// Mutable pixel buffer used to build rasters (drawing, filters).
class Canvas {
 public:
  Canvas(int width, int height, Rgb fill = {});

  int width() const { return width_; }
  int height() const { return height_; }

  void set(int x, int y, Rgb c) {
    std::uint8_t* p = bytes_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3;
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }
  Rgb get(int x, int y) const {
    const std::uint8_t* p = bytes_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3;
    return Rgb{p[0], p[1], p[2]};
  }
  void fill_rect(const BBox& box, Rgb c);
  std::vector<std::uint8_t>& bytes() { return bytes_; }

  // Moves the pixels into an immutable raster; the canvas is left empty.
  Raster finish() &&;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> bytes_;
};

Raster apply_transform(const Raster& img, TransformKind kind);

enum class CropMode { kStrict, kClip };

// Strict mode throws kOutOfBounds when the box leaves the image and
// kEmptyRegion for an empty box. Clip mode intersects with the image first
// and throws kEmptyRegion when nothing is left.
Raster crop(const Raster& img, const BBox& box, CropMode mode = CropMode::kStrict);

// Region that crop() would copy for `box` in the given mode.
BBox resolve_crop_box(const BBox& box, int width, int height, CropMode mode);

inline constexpr double kDefaultBrightness = 1.3;
inline constexpr double kDefaultContrast = 1.3;
inline constexpr int kDefaultBlurRadius = 2;
inline constexpr int kMaxBlurRadius = 64;

Raster adjust_brightness(const Raster& img, double factor);
Raster adjust_contrast(const Raster& img, double factor);
Raster to_grayscale(const Raster& img);
Raster box_blur(const Raster& img, int radius);
Raster sharpen(const Raster& img);
Raster edge_detect(const Raster& img);

struct EnhanceParams {
  double factor = kDefaultBrightness;
  int radius = kDefaultBlurRadius;
};

// Dispatches to the enhancement named by `tool`; kBadParam for a
// non-enhancement tool or out-of-range parameters.
Raster enhance(const Raster& img, ToolId tool, const EnhanceParams& params = {});

// Integer luma, round(0.299 r + 0.587 g + 0.114 b).
std::uint8_t luma(Rgb c);

// Every kind k with apply_transform(canonical, k) == observed, in
// kAllTransforms order.
std::vector<TransformKind> detect_transform(const Raster& canonical, const Raster& observed);

}  // namespace toolvis

#endif  // TOOLVIS_RASTER_HPP_
