// Copyright 2026 The RaaS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "raas/common/config.h"

#include <charconv>
#include <fstream>
#include <sstream>

namespace raas {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

Result<KeyValueConfig> KeyValueConfig::Parse(std::string_view text) {
  KeyValueConfig config;
  size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{}
                                        : text.substr(nl + 1);
    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      return Status(ErrorCode::kParseError,
                    "line " + std::to_string(line_no) + ": expected key=value");
    }
    std::string key(Trim(line.substr(0, eq)));
    std::string value(Trim(line.substr(eq + 1)));
    if (key.empty()) {
      return Status(ErrorCode::kParseError,
                    "line " + std::to_string(line_no) + ": empty key");
    }
    config.entries_[std::move(key)] = std::move(value);
  }
  return config;
}

Result<KeyValueConfig> KeyValueConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return Status(ErrorCode::kBadConfig, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

bool KeyValueConfig::Has(std::string_view key) const {
  return entries_.find(key) != entries_.end();
}

void KeyValueConfig::Set(std::string key, std::string value) {
  entries_[std::move(key)] = std::move(value);
}

Status KeyValueConfig::TakeUint(std::string_view key, uint64_t& out) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return Status::Ok();
  taken_.insert(it->first);
  const std::string& v = it->second;
  uint64_t parsed = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    return Status(ErrorCode::kBadConfig,
                  std::string(key) + ": not an unsigned integer: " + v);
  }
  out = parsed;
  return Status::Ok();
}

Status KeyValueConfig::TakeDouble(std::string_view key, double& out) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return Status::Ok();
  taken_.insert(it->first);
  const std::string& v = it->second;
  double parsed = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    return Status(ErrorCode::kBadConfig,
                  std::string(key) + ": not a number: " + v);
  }
  out = parsed;
  return Status::Ok();
}

Status KeyValueConfig::TakeString(std::string_view key, std::string& out) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return Status::Ok();
  taken_.insert(it->first);
  out = it->second;
  return Status::Ok();
}

Status KeyValueConfig::RejectUnknown() const {
  for (const auto& [key, value] : entries_) {
    if (taken_.find(key) == taken_.end()) {
      return Status(ErrorCode::kBadConfig, "unknown key: " + key);
    }
  }
  return Status::Ok();
}

}  // namespace raas
