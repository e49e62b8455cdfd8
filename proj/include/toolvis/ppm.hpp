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

#ifndef TOOLVIS_PPM_HPP_
#define TOOLVIS_PPM_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include "toolvis/raster.hpp"

namespace toolvis {

// Binary P6, maxval 255. The header is exactly "P6 <w> <h> 255\n" so equal
// rasters always encode to equal bytes.
std::string encode_ppm(const Raster& img);

// Accepts any conforming P6 header (comments, arbitrary whitespace) with
// maxval 255.
Raster decode_ppm(std::string_view bytes);

void write_ppm(const std::filesystem::path& path, const Raster& img);
Raster read_ppm(const std::filesystem::path& path);

}  // namespace toolvis

#endif  // TOOLVIS_PPM_HPP_
