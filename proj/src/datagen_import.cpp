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

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "toolvis/datagen.hpp"
#include "toolvis/ppm.hpp"

namespace toolvis {

std::vector<SceneDoc> import_scenes(const std::filesystem::path& jsonl) {
  std::ifstream in(jsonl, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + jsonl.string());
  std::vector<SceneDoc> scenes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto corrupt = [&](const std::string& why) {
      return Error(ErrorCode::kCorruptRecord,
                   jsonl.string() + ":" + std::to_string(line_no) + ": " + why);
    };
    SceneDoc doc;
    doc.provenance = Provenance::kImported;
    try {
      const auto rec = nlohmann::json::parse(line);
      std::filesystem::path image_path = rec.at("image_path").get<std::string>();
      if (image_path.is_relative()) image_path = jsonl.parent_path() / image_path;
      doc.image = read_ppm(image_path);
      for (const auto& a : rec.at("annotations")) {
        const auto level = level_from_name(a.at("level").get<std::string>());
        if (!level) throw corrupt("unknown annotation level");
        Annotation ann;
        ann.level = *level;
        ann.text = a.at("text").get<std::string>();
        if (ann.text.empty()) throw corrupt("empty annotation text");
        const auto& vertices = a.at("vertices");
        if (vertices.empty()) throw corrupt("annotation without vertices");
        double x0 = 1e18, y0 = 1e18, x1 = -1e18, y1 = -1e18;
        for (const auto& v : vertices) {
          const double x = v.at(0).get<double>();
          const double y = v.at(1).get<double>();
          x0 = std::min(x0, x);
          y0 = std::min(y0, y);
          x1 = std::max(x1, x);
          y1 = std::max(y1, y);
        }
        BBox box{static_cast<int>(std::floor(x0)), static_cast<int>(std::floor(y0)),
                 static_cast<int>(std::ceil(x1)), static_cast<int>(std::ceil(y1))};
        if (box.x1 == box.x0) ++box.x1;
        if (box.y1 == box.y0) ++box.y1;
        if (!box.valid() || !doc.image.bounds().contains(box)) {
          throw corrupt("annotation box " + to_string(box) + " outside the image");
        }
        ann.box = box;
        doc.annotations.push_back(std::move(ann));
      }
    } catch (const nlohmann::json::exception& e) {
      throw corrupt(e.what());
    }
    scenes.push_back(std::move(doc));
  }
  return scenes;
}

}  // namespace toolvis
