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

#include "toolvis/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "toolvis/error.hpp"

namespace toolvis {
namespace {

std::uint8_t clamp_u8(long v) {
  return static_cast<std::uint8_t>(std::clamp<long>(v, 0, 255));
}

// Source pixel of destination pixel (u, v) when `kind` is applied to a
// width x height image.
struct SourceMap {
  TransformKind kind;
  int w;
  int h;

  void operator()(int u, int v, int& x, int& y) const {
    switch (kind) {
      case TransformKind::kIdentity: x = u, y = v; break;
      case TransformKind::kRot90: x = v, y = h - 1 - u; break;
      case TransformKind::kRot180: x = w - 1 - u, y = h - 1 - v; break;
      case TransformKind::kRot270: x = w - 1 - v, y = u; break;
      case TransformKind::kFlipH: x = w - 1 - u, y = v; break;
      case TransformKind::kFlipV: x = u, y = h - 1 - v; break;
    }
  }
};

template <typename F>
Raster map_pixels(const Raster& img, F&& f) {
  Canvas out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.set(x, y, f(img.at(x, y)));
  }
  return std::move(out).finish();
}

// Sum over the (2r+1)^2 window with edge clamping, per channel. Separable:
// the clamped 2-D window is the product of two clamped 1-D windows.
std::vector<long> window_sums(const Raster& img, int radius) {
  const int w = img.width();
  const int h = img.height();
  const auto src = img.bytes();
  std::vector<long> horiz(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      long s[3] = {0, 0, 0};
      for (int dx = -radius; dx <= radius; ++dx) {
        const int xx = std::clamp(x + dx, 0, w - 1);
        const std::size_t i = (static_cast<std::size_t>(y) * w + xx) * 3;
        s[0] += src[i], s[1] += src[i + 1], s[2] += src[i + 2];
      }
      const std::size_t o = (static_cast<std::size_t>(y) * w + x) * 3;
      horiz[o] = s[0], horiz[o + 1] = s[1], horiz[o + 2] = s[2];
    }
  }
  std::vector<long> out(horiz.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      long s[3] = {0, 0, 0};
      for (int dy = -radius; dy <= radius; ++dy) {
        const int yy = std::clamp(y + dy, 0, h - 1);
        const std::size_t i = (static_cast<std::size_t>(yy) * w + x) * 3;
        s[0] += horiz[i], s[1] += horiz[i + 1], s[2] += horiz[i + 2];
      }
      const std::size_t o = (static_cast<std::size_t>(y) * w + x) * 3;
      out[o] = s[0], out[o + 1] = s[1], out[o + 2] = s[2];
    }
  }
  return out;
}

void check_factor(const char* tool, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    std::ostringstream msg;
    msg << tool << ": factor must be > 0, got " << factor;
    throw Error(ErrorCode::kBadParam, msg.str());
  }
}

}  // namespace

Raster::Raster() : Raster(1, 1, Rgb{}) {}

Raster::Raster(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "raster dimensions must be >= 1, got " +
                                                 std::to_string(width) + "x" +
                                                 std::to_string(height));
  }
  auto data = std::make_shared<std::vector<std::uint8_t>>(pixel_count() * 3);
  for (std::size_t i = 0; i < data->size(); i += 3) {
    (*data)[i] = fill.r, (*data)[i + 1] = fill.g, (*data)[i + 2] = fill.b;
  }
  data_ = std::move(data);
}

Raster::Raster(int width, int height, std::vector<std::uint8_t> bytes)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "raster dimensions must be >= 1, got " +
                                                 std::to_string(width) + "x" +
                                                 std::to_string(height));
  }
  if (bytes.size() != pixel_count() * 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "raster byte count " + std::to_string(bytes.size()) + " != " +
                    std::to_string(pixel_count() * 3));
  }
  data_ = std::make_shared<const std::vector<std::uint8_t>>(std::move(bytes));
}

bool operator==(const Raster& a, const Raster& b) {
  if (a.width_ != b.width_ || a.height_ != b.height_) return false;
  if (a.data_ == b.data_) return true;
  return *a.data_ == *b.data_;
}

Canvas::Canvas(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "canvas dimensions must be >= 1");
  }
  bytes_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < bytes_.size(); i += 3) {
    bytes_[i] = fill.r, bytes_[i + 1] = fill.g, bytes_[i + 2] = fill.b;
  }
}

void Canvas::fill_rect(const BBox& box, Rgb c) {
  const auto clipped = intersect(box, BBox{0, 0, width_, height_});
  if (!clipped) return;
  for (int y = clipped->y0; y < clipped->y1; ++y) {
    for (int x = clipped->x0; x < clipped->x1; ++x) set(x, y, c);
  }
}

Raster Canvas::finish() && {
  Raster r(width_, height_, std::move(bytes_));
  bytes_.clear();
  return r;
}

Raster apply_transform(const Raster& img, TransformKind kind) {
  if (kind == TransformKind::kIdentity) return img;
  const int w = img.width();
  const int h = img.height();
  const int out_w = swaps_dims(kind) ? h : w;
  const int out_h = swaps_dims(kind) ? w : h;
  const SourceMap src_of{kind, w, h};
  const auto src = img.bytes();
  std::vector<std::uint8_t> out(src.size());
  std::size_t o = 0;
  for (int v = 0; v < out_h; ++v) {
    for (int u = 0; u < out_w; ++u) {
      int x = 0, y = 0;
      src_of(u, v, x, y);
      const std::size_t i = (static_cast<std::size_t>(y) * w + x) * 3;
      out[o++] = src[i];
      out[o++] = src[i + 1];
      out[o++] = src[i + 2];
    }
  }
  return Raster(out_w, out_h, std::move(out));
}

BBox resolve_crop_box(const BBox& box, int width, int height, CropMode mode) {
  const BBox frame{0, 0, width, height};
  if (mode == CropMode::kStrict) {
    if (box.x1 <= box.x0 || box.y1 <= box.y0) {
      throw Error(ErrorCode::kEmptyRegion, "crop: empty region " + to_string(box));
    }
    if (!frame.contains(box)) {
      throw Error(ErrorCode::kOutOfBounds,
                  "crop: region " + to_string(box) + " exceeds image bounds " +
                      std::to_string(width) + "x" + std::to_string(height));
    }
    return box;
  }
  const auto clipped = (box.x1 > box.x0 && box.y1 > box.y0) ? intersect(box, frame)
                                                            : std::nullopt;
  if (!clipped) {
    throw Error(ErrorCode::kEmptyRegion,
                "crop: region " + to_string(box) + " does not overlap image " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
  return *clipped;
}

Raster crop(const Raster& img, const BBox& box, CropMode mode) {
  const BBox r = resolve_crop_box(box, img.width(), img.height(), mode);
  const auto src = img.bytes();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(r.area()) * 3);
  const std::size_t row = static_cast<std::size_t>(r.width()) * 3;
  for (int y = r.y0; y < r.y1; ++y) {
    const std::size_t i = (static_cast<std::size_t>(y) * img.width() + r.x0) * 3;
    std::memcpy(out.data() + static_cast<std::size_t>(y - r.y0) * row, src.data() + i, row);
  }
  return Raster(r.width(), r.height(), std::move(out));
}

std::uint8_t luma(Rgb c) {
  return static_cast<std::uint8_t>((299 * c.r + 587 * c.g + 114 * c.b + 500) / 1000);
}

Raster adjust_brightness(const Raster& img, double factor) {
  check_factor("brightness", factor);
  return map_pixels(img, [factor](Rgb c) {
    return Rgb{clamp_u8(std::lround(c.r * factor)), clamp_u8(std::lround(c.g * factor)),
               clamp_u8(std::lround(c.b * factor))};
  });
}

Raster adjust_contrast(const Raster& img, double factor) {
  check_factor("contrast", factor);
  auto f = [factor](std::uint8_t v) {
    return clamp_u8(std::lround(128.0 + (static_cast<double>(v) - 128.0) * factor));
  };
  return map_pixels(img, [&f](Rgb c) { return Rgb{f(c.r), f(c.g), f(c.b)}; });
}

Raster to_grayscale(const Raster& img) {
  return map_pixels(img, [](Rgb c) {
    const std::uint8_t y = luma(c);
    return Rgb{y, y, y};
  });
}

Raster box_blur(const Raster& img, int radius) {
  if (radius < 1 || radius > kMaxBlurRadius) {
    throw Error(ErrorCode::kBadParam, "blur: radius must be an integer in [1, " +
                                          std::to_string(kMaxBlurRadius) + "], got " +
                                          std::to_string(radius));
  }
  const auto sums = window_sums(img, radius);
  const long n = static_cast<long>(2 * radius + 1) * (2 * radius + 1);
  std::vector<std::uint8_t> out(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((sums[i] + n / 2) / n);
  }
  return Raster(img.width(), img.height(), std::move(out));
}

Raster sharpen(const Raster& img) {
  const Raster blurred = box_blur(img, 1);
  const auto a = img.bytes();
  const auto b = blurred.bytes();
  std::vector<std::uint8_t> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = clamp_u8(2L * a[i] - b[i]);
  return Raster(img.width(), img.height(), std::move(out));
}

Raster edge_detect(const Raster& img) {
  const int w = img.width();
  const int h = img.height();
  std::vector<int> y_plane(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) y_plane[static_cast<std::size_t>(y) * w + x] = luma(img.at(x, y));
  }
  auto L = [&](int x, int y) {
    return y_plane[static_cast<std::size_t>(std::clamp(y, 0, h - 1)) * w +
                   std::clamp(x, 0, w - 1)];
  };
  Canvas out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const long gx = (L(x + 1, y - 1) + 2 * L(x + 1, y) + L(x + 1, y + 1)) -
                      (L(x - 1, y - 1) + 2 * L(x - 1, y) + L(x - 1, y + 1));
      const long gy = (L(x - 1, y + 1) + 2 * L(x, y + 1) + L(x + 1, y + 1)) -
                      (L(x - 1, y - 1) + 2 * L(x, y - 1) + L(x + 1, y - 1));
      const std::uint8_t m =
          clamp_u8(std::lround(std::sqrt(static_cast<double>(gx * gx + gy * gy))));
      out.set(x, y, Rgb{m, m, m});
    }
  }
  return std::move(out).finish();
}

Raster enhance(const Raster& img, ToolId tool, const EnhanceParams& params) {
  switch (tool) {
    case ToolId::kBrightness: return adjust_brightness(img, params.factor);
    case ToolId::kContrast: return adjust_contrast(img, params.factor);
    case ToolId::kGrayscale: return to_grayscale(img);
    case ToolId::kBlur: return box_blur(img, params.radius);
    case ToolId::kSharpen: return sharpen(img);
    case ToolId::kEdgeDetect: return edge_detect(img);
    default:
      throw Error(ErrorCode::kBadParam,
                  std::string(tool_name(tool)) + " is not an enhancement tool");
  }
}

std::vector<TransformKind> detect_transform(const Raster& canonical, const Raster& observed) {
  std::vector<TransformKind> found;
  const int w = canonical.width();
  const int h = canonical.height();
  const auto src = canonical.bytes();
  const auto obs = observed.bytes();
  for (TransformKind kind : kAllTransforms) {
    const int out_w = swaps_dims(kind) ? h : w;
    const int out_h = swaps_dims(kind) ? w : h;
    if (observed.width() != out_w || observed.height() != out_h) continue;
    const SourceMap src_of{kind, w, h};
    bool match = true;
    std::size_t o = 0;
    for (int v = 0; v < out_h && match; ++v) {
      for (int u = 0; u < out_w; ++u, o += 3) {
        int x = 0, y = 0;
        src_of(u, v, x, y);
        const std::size_t i = (static_cast<std::size_t>(y) * w + x) * 3;
        if (src[i] != obs[o] || src[i + 1] != obs[o + 1] || src[i + 2] != obs[o + 2]) {
          match = false;
          break;
        }
      }
    }
    if (match) found.push_back(kind);
  }
  return found;
}

}  // namespace toolvis
