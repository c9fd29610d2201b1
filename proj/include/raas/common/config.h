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

#ifndef RAAS_COMMON_CONFIG_H_
#define RAAS_COMMON_CONFIG_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "raas/common/status.h"

namespace raas {

// Flat `key = value` text config. Lines starting with '#' are comments.
// Readers pull typed values out with Take*(); anything left untaken is
// reported by RejectUnknown() so typos do not silently fall back to
// defaults.
class KeyValueConfig {
 public:
  static Result<KeyValueConfig> Parse(std::string_view text);
  static Result<KeyValueConfig> Load(const std::string& path);

  bool Has(std::string_view key) const;
  void Set(std::string key, std::string value);

  Status TakeUint(std::string_view key, uint64_t& out);
  Status TakeDouble(std::string_view key, double& out);
  Status TakeString(std::string_view key, std::string& out);

  Status RejectUnknown() const;

  const std::map<std::string, std::string, std::less<>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
  std::set<std::string, std::less<>> taken_;
};

}  // namespace raas

#endif  // RAAS_COMMON_CONFIG_H_
