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

#ifndef TOOLVIS_VERIFY_HPP_
#define TOOLVIS_VERIFY_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "toolvis/datagen.hpp"

namespace toolvis {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Scenes small enough for quick checks; the area threshold is raised so
// body words still count as small.
GenConfig compact_gen_config(std::uint64_t seed);

// Quick invariant checks over the whole library. `scratch` receives
// temporary files for the store round trip.
std::vector<CheckResult> run_self_checks(std::uint64_t seed, const std::filesystem::path& scratch);

}  // namespace toolvis

#endif  // TOOLVIS_VERIFY_HPP_
