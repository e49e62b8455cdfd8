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

#include "toolvis/ppm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>

#include "toolvis/error.hpp"

namespace toolvis {
namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  long number() {
    skip_space_and_comments();
    long v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000'000L) throw Error(ErrorCode::kInvalidArgument, "ppm: header value too large");
      ++pos_, ++digits;
    }
    if (digits == 0) throw Error(ErrorCode::kInvalidArgument, "ppm: malformed header");
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_ppm(const Raster& img) {
  std::string out = "P6 " + std::to_string(img.width()) + " " +
                    std::to_string(img.height()) + " 255\n";
  const auto px = img.bytes();
  out.append(reinterpret_cast<const char*>(px.data()), px.size());
  return out;
}

Raster decode_ppm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw Error(ErrorCode::kInvalidArgument, "ppm: missing P6 magic");
  }
  HeaderReader reader(bytes);
  reader.advance(2);
  const long w = reader.number();
  const long h = reader.number();
  const long maxval = reader.number();
  if (maxval != 255) throw Error(ErrorCode::kInvalidArgument, "ppm: maxval must be 255");
  if (w < 1 || h < 1) throw Error(ErrorCode::kInvalidArgument, "ppm: empty image");
  // Exactly one whitespace byte separates the header from the raster.
  if (reader.pos() >= bytes.size() ||
      !std::isspace(static_cast<unsigned char>(bytes[reader.pos()]))) {
    throw Error(ErrorCode::kInvalidArgument, "ppm: malformed header");
  }
  reader.advance(1);
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
  if (bytes.size() - reader.pos() != need) {
    throw Error(ErrorCode::kInvalidArgument, "ppm: expected " + std::to_string(need) +
                                                 " pixel bytes, found " +
                                                 std::to_string(bytes.size() - reader.pos()));
  }
  const auto* p = reinterpret_cast<const std::uint8_t*>(bytes.data() + reader.pos());
  return Raster(static_cast<int>(w), static_cast<int>(h), std::vector<std::uint8_t>(p, p + need));
}

void write_ppm(const std::filesystem::path& path, const Raster& img) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  const std::string data = encode_ppm(img);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

Raster read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_ppm(data);
}

}  // namespace toolvis
