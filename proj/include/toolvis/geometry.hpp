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

#ifndef TOOLVIS_GEOMETRY_HPP_
#define TOOLVIS_GEOMETRY_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace toolvis {

// Half-open pixel box: [x0, x1) x [y0, y1).
struct BBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  bool valid() const { return x0 >= 0 && y0 >= 0 && x0 < x1 && y0 < y1; }
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  std::int64_t area() const {
    return static_cast<std::int64_t>(x1 - x0) * static_cast<std::int64_t>(y1 - y0);
  }
  bool contains(const BBox& other) const {
    return x0 <= other.x0 && y0 <= other.y0 && other.x1 <= x1 && other.y1 <= y1;
  }
  bool contains_point(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

std::string to_string(const BBox& box);

// Overlap of two boxes, or nullopt when they do not share a pixel.
std::optional<BBox> intersect(const BBox& a, const BBox& b);

// Intersection-over-union of two valid boxes. Throws kInvalidArgument on an
// invalid box.
double iou(const BBox& a, const BBox& b);

enum class TransformKind : std::uint8_t {
  kIdentity,
  kRot90,   // clockwise
  kRot180,
  kRot270,  // counter-clockwise
  kFlipH,   // mirror x
  kFlipV,   // mirror y
};

inline constexpr std::array<TransformKind, 6> kAllTransforms = {
    TransformKind::kIdentity, TransformKind::kRot90, TransformKind::kRot180,
    TransformKind::kRot270,   TransformKind::kFlipH, TransformKind::kFlipV};

// The five orientation corruptions, in the fixed option order used by the
// diagnostic (rot90/rot180/rot270/hflip/vflip).
inline constexpr std::array<TransformKind, 5> kCorruptions = {
    TransformKind::kRot90, TransformKind::kRot180, TransformKind::kRot270,
    TransformKind::kFlipH, TransformKind::kFlipV};

std::string_view transform_name(TransformKind kind);
std::optional<TransformKind> transform_from_name(std::string_view name);

TransformKind inverse(TransformKind kind);

// Kind equal to applying `first` and then `second`, when that composite is
// itself one of the six kinds (Rot90 then FlipH is a transpose and is not).
std::optional<TransformKind> compose(TransformKind first, TransformKind second);

bool swaps_dims(TransformKind kind);

// Affine map from the pixel grid of a working image to the pixel grid of the
// canonical image it was derived from by orientation transforms and crops.
// canonical = A * p + t, A a signed permutation matrix.
class Frame {
 public:
  Frame(int canonical_width, int canonical_height);

  int width() const { return width_; }
  int height() const { return height_; }

  // Frame of the image obtained by applying `kind` to the current image.
  Frame after_transform(TransformKind kind) const;
  // Frame of the sub-image `region` (current coordinates, assumed in bounds).
  Frame after_crop(const BBox& region) const;

  BBox to_canonical(const BBox& box) const;
  BBox from_canonical(const BBox& box) const;
  // Region of the canonical image visible in the current image.
  BBox view() const { return to_canonical(BBox{0, 0, width_, height_}); }
  // True iff the current image has canonical orientation.
  bool upright() const { return a_ == 1 && b_ == 0 && c_ == 0 && d_ == 1; }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  Frame() = default;
  std::array<int, 2> map_point(int x, int y) const;

  int a_ = 1, b_ = 0, c_ = 0, d_ = 1;
  int tx_ = 0, ty_ = 0;
  int width_ = 0, height_ = 0;
};

}  // namespace toolvis

#endif  // TOOLVIS_GEOMETRY_HPP_
