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

#include "toolvis/geometry.hpp"

#include <algorithm>

#include "toolvis/error.hpp"

namespace toolvis {

std::string to_string(const BBox& box) {
  return "(" + std::to_string(box.x0) + "," + std::to_string(box.y0) + "," +
         std::to_string(box.x1) + "," + std::to_string(box.y1) + ")";
}

std::optional<BBox> intersect(const BBox& a, const BBox& b) {
  BBox r{std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1),
         std::min(a.y1, b.y1)};
  if (r.x0 >= r.x1 || r.y0 >= r.y1) return std::nullopt;
  return r;
}

double iou(const BBox& a, const BBox& b) {
  if (!a.valid() || !b.valid()) {
    throw Error(ErrorCode::kInvalidArgument,
                "iou: invalid box " + to_string(a.valid() ? b : a));
  }
  const auto inter = intersect(a, b);
  const std::int64_t inter_area = inter ? inter->area() : 0;
  const std::int64_t union_area = a.area() + b.area() - inter_area;
  return static_cast<double>(inter_area) / static_cast<double>(union_area);
}

std::string_view transform_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::kIdentity: return "identity";
    case TransformKind::kRot90: return "rot90";
    case TransformKind::kRot180: return "rot180";
    case TransformKind::kRot270: return "rot270";
    case TransformKind::kFlipH: return "hflip";
    case TransformKind::kFlipV: return "vflip";
  }
  return "identity";
}

std::optional<TransformKind> transform_from_name(std::string_view name) {
  for (TransformKind k : kAllTransforms) {
    if (transform_name(k) == name) return k;
  }
  return std::nullopt;
}

TransformKind inverse(TransformKind kind) {
  switch (kind) {
    case TransformKind::kRot90: return TransformKind::kRot270;
    case TransformKind::kRot270: return TransformKind::kRot90;
    default: return kind;
  }
}

std::optional<TransformKind> compose(TransformKind first, TransformKind second) {
  // Odd, non-square probe dims make every dihedral element distinguishable.
  const Frame probe(5, 7);
  const Frame composite = probe.after_transform(first).after_transform(second);
  for (TransformKind k : kAllTransforms) {
    if (probe.after_transform(k) == composite) return k;
  }
  return std::nullopt;
}

bool swaps_dims(TransformKind kind) {
  return kind == TransformKind::kRot90 || kind == TransformKind::kRot270;
}

Frame::Frame(int canonical_width, int canonical_height)
    : width_(canonical_width), height_(canonical_height) {}

std::array<int, 2> Frame::map_point(int x, int y) const {
  return {a_ * x + b_ * y + tx_, c_ * x + d_ * y + ty_};
}

Frame Frame::after_transform(TransformKind kind) const {
  // Old pixel p = M q + m for a pixel q of the transformed image.
  int m00 = 1, m01 = 0, m10 = 0, m11 = 1, mx = 0, my = 0;
  int w = width_, h = height_;
  switch (kind) {
    case TransformKind::kIdentity:
      break;
    case TransformKind::kRot90:
      m00 = 0, m01 = 1, m10 = -1, m11 = 0, my = height_ - 1;
      std::swap(w, h);
      break;
    case TransformKind::kRot180:
      m00 = -1, m11 = -1, mx = width_ - 1, my = height_ - 1;
      break;
    case TransformKind::kRot270:
      m00 = 0, m01 = -1, m10 = 1, m11 = 0, mx = width_ - 1;
      std::swap(w, h);
      break;
    case TransformKind::kFlipH:
      m00 = -1, mx = width_ - 1;
      break;
    case TransformKind::kFlipV:
      m11 = -1, my = height_ - 1;
      break;
  }
  Frame f;
  f.a_ = a_ * m00 + b_ * m10;
  f.b_ = a_ * m01 + b_ * m11;
  f.c_ = c_ * m00 + d_ * m10;
  f.d_ = c_ * m01 + d_ * m11;
  f.tx_ = a_ * mx + b_ * my + tx_;
  f.ty_ = c_ * mx + d_ * my + ty_;
  f.width_ = w;
  f.height_ = h;
  return f;
}

Frame Frame::after_crop(const BBox& region) const {
  Frame f = *this;
  f.tx_ = a_ * region.x0 + b_ * region.y0 + tx_;
  f.ty_ = c_ * region.x0 + d_ * region.y0 + ty_;
  f.width_ = region.width();
  f.height_ = region.height();
  return f;
}

BBox Frame::to_canonical(const BBox& box) const {
  const auto p = map_point(box.x0, box.y0);
  const auto q = map_point(box.x1 - 1, box.y1 - 1);
  return BBox{std::min(p[0], q[0]), std::min(p[1], q[1]), std::max(p[0], q[0]) + 1,
              std::max(p[1], q[1]) + 1};
}

BBox Frame::from_canonical(const BBox& box) const {
  // A is a signed permutation, so its inverse is its transpose.
  auto unmap = [this](int x, int y) {
    const int dx = x - tx_;
    const int dy = y - ty_;
    return std::array<int, 2>{a_ * dx + c_ * dy, b_ * dx + d_ * dy};
  };
  const auto p = unmap(box.x0, box.y0);
  const auto q = unmap(box.x1 - 1, box.y1 - 1);
  return BBox{std::min(p[0], q[0]), std::min(p[1], q[1]), std::max(p[0], q[0]) + 1,
              std::max(p[1], q[1]) + 1};
}

}  // namespace toolvis
