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

#ifndef TOOLVIS_KV_HPP_
#define TOOLVIS_KV_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace toolvis {

// Flat key=value configuration. Blank lines and lines starting with '#' are
// ignored; whitespace around keys and values is trimmed.
class KeyValues {
 public:
  KeyValues() = default;

  // Throws Error(kInvalidArgument) naming the offending line.
  static KeyValues parse(std::string_view text);
  static KeyValues load(const std::filesystem::path& path);
  // "a=1,b=2" or a path to a key=value file.
  static KeyValues from_arg(std::string_view arg);

  void set(std::string key, std::string value);
  // Entries of `other` override ours.
  void merge(const KeyValues& other);

  bool has(std::string_view key) const { return values_.find(key) != values_.end(); }
  const std::map<std::string, std::string, std::less<>>& values() const { return values_; }

  double get_double(std::string_view key, double fallback) const;
  long long get_int(std::string_view key, long long fallback) const;
  std::string get_string(std::string_view key, std::string fallback) const;

  // Throws kInvalidArgument listing any key not in `known`.
  void require_known(std::initializer_list<std::string_view> known) const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace toolvis

#endif  // TOOLVIS_KV_HPP_
