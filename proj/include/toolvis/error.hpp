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

#ifndef TOOLVIS_ERROR_HPP_
#define TOOLVIS_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace toolvis {

enum class ErrorCode {
  kInvalidArgument,
  // raster
  kOutOfBounds,
  kEmptyRegion,
  kBadParam,
  // toolprog
  kParseError,
  kDuplicateTool,
  // episode
  kInvalidTask,
  kEpisodeTerminated,
  // reward
  kNotTerminated,
  kNoRequirement,
  kIncompleteGroup,
  // datagen
  kOverflow,
  kNoCandidate,
  kInfeasible,
  // store
  kCorruptRecord,
  kChecksumMismatch,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// Single exception type for the library; the code identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace toolvis

#endif  // TOOLVIS_ERROR_HPP_
