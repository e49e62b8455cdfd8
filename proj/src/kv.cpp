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

#include "toolvis/kv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "toolvis/error.hpp"

namespace toolvis {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues KeyValues::parse(std::string_view text) {
  KeyValues kv;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = trim(text.substr(pos, nl - pos));
    ++line_no;
    pos = nl + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "config line " + std::to_string(line_no) + ": empty key");
    }
    if (kv.has(key)) {
      throw Error(ErrorCode::kInvalidArgument, "config line " + std::to_string(line_no) +
                                                   ": duplicate key '" + std::string(key) + "'");
    }
    kv.set(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

KeyValues KeyValues::from_arg(std::string_view arg) {
  std::error_code ec;
  if (arg.find('=') == std::string_view::npos || std::filesystem::is_regular_file(arg, ec)) {
    return load(std::filesystem::path(arg));
  }
  std::string text(arg);
  for (char& c : text) {
    if (c == ',') c = '\n';
  }
  return parse(text);
}

void KeyValues::set(std::string key, std::string value) {
  values_.insert_or_assign(std::move(key), std::move(value));
}

void KeyValues::merge(const KeyValues& other) {
  for (const auto& [k, v] : other.values_) set(k, v);
}

double KeyValues::get_double(std::string_view key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "config key '" + std::string(key) + "': expected a number, got '" + s + "'");
  }
  return v;
}

long long KeyValues::get_int(std::string_view key, long long fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "config key '" + std::string(key) + "': expected an integer, got '" + s + "'");
  }
  return v;
}

std::string KeyValues::get_string(std::string_view key, std::string fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

void KeyValues::require_known(std::initializer_list<std::string_view> known) const {
  std::string unknown;
  for (const auto& [k, v] : values_) {
    bool found = false;
    for (std::string_view n : known) found = found || n == k;
    if (!found) unknown += (unknown.empty() ? "" : ", ") + k;
  }
  if (!unknown.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown config keys: " + unknown);
  }
}

}  // namespace toolvis
