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

#include "raas/bench/scenario.h"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace raas::bench {

std::string_view ModeName(Mode mode) {
  switch (mode) {
    case Mode::kNaive:
      return "naive";
    case Mode::kRaas:
      return "raas";
    case Mode::kLocked:
      return "locked";
  }
  return "?";
}

Result<Mode> ParseMode(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "naive") return Mode::kNaive;
  if (lower == "raas") return Mode::kRaas;
  if (lower == "locked" || lower == "locked_sharing") return Mode::kLocked;
  return Status(ErrorCode::kBadConfig, "unknown mode '" + lower + "'");
}

namespace {

Result<std::vector<uint32_t>> ParseList(std::string_view text) {
  std::vector<uint32_t> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{}
                                           : text.substr(comma + 1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) {
      item.remove_prefix(1);
    }
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) {
      item.remove_suffix(1);
    }
    uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      return Status(ErrorCode::kBadConfig,
                    "bad connection count '" + std::string(item) + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

Result<BenchScenario> BenchScenario::FromConfig(KeyValueConfig& config) {
  BenchScenario s;
  RAAS_RETURN_IF_ERROR(config.TakeString("name", s.name));
  std::string text;
  if (config.Has("mode")) {
    RAAS_RETURN_IF_ERROR(config.TakeString("mode", text));
    auto mode = ParseMode(text);
    RAAS_RETURN_IF_ERROR(mode.status());
    s.mode = *mode;
  }
  if (config.Has("connections")) {
    RAAS_RETURN_IF_ERROR(config.TakeString("connections", text));
    auto list = ParseList(text);
    RAAS_RETURN_IF_ERROR(list.status());
    s.connections = *list;
  }
  if (config.Has("q") && s.mode != Mode::kLocked) {
    return Status(ErrorCode::kBadConfig, "q applies to locked mode only");
  }
  uint64_t v = 0;
  auto take32 = [&](std::string_view key, uint32_t& field) -> Status {
    v = field;
    RAAS_RETURN_IF_ERROR(config.TakeUint(key, v));
    if (v > UINT32_MAX) return Status(ErrorCode::kBadConfig, std::string(key));
    field = static_cast<uint32_t>(v);
    return Status::Ok();
  };
  RAAS_RETURN_IF_ERROR(take32("q", s.q));
  RAAS_RETURN_IF_ERROR(take32("threads", s.threads));
  RAAS_RETURN_IF_ERROR(take32("workers", s.workers));
  RAAS_RETURN_IF_ERROR(config.TakeUint("msg_size", s.msg_size));
  if (config.Has("op")) {
    RAAS_RETURN_IF_ERROR(config.TakeString("op", text));
    if (text != "READ" && text != "read") {
      return Status(ErrorCode::kBadConfig, "only READ workloads are modeled");
    }
  }
  RAAS_RETURN_IF_ERROR(config.TakeDouble("duration", s.duration_s));
  RAAS_RETURN_IF_ERROR(config.TakeUint("seed", s.seed));
  RAAS_RETURN_IF_ERROR(take32("batching_window", s.batching_window));
  RAAS_RETURN_IF_ERROR(config.TakeUint("lock_penalty_ns", s.lock_penalty_ns));
  RAAS_RETURN_IF_ERROR(config.TakeUint("lock_hold_ns", s.lock_hold_ns));
  RAAS_RETURN_IF_ERROR(config.TakeUint("app_request_ns", s.app_request_ns));
  RAAS_RETURN_IF_ERROR(
      config.TakeUint("worker_request_ns", s.worker_request_ns));
  RAAS_RETURN_IF_ERROR(config.TakeUint("object_bytes", s.object_bytes));

  // NIC and fabric constants: inline keys, or a file whose keys inline
  // entries override.
  if (config.Has("nic_model")) {
    RAAS_RETURN_IF_ERROR(config.TakeString("nic_model", text));
    auto nic = KeyValueConfig::Load(text);
    RAAS_RETURN_IF_ERROR(nic.status());
    for (const auto& [key, value] : nic->entries()) {
      if (!config.Has(key)) config.Set(key, value);
    }
  }
  auto fabric = verbs::FabricConfig::FromConfig(config);
  RAAS_RETURN_IF_ERROR(fabric.status());
  s.fabric = *fabric;
  RAAS_RETURN_IF_ERROR(s.Validate());
  return s;
}

Result<BenchScenario> BenchScenario::Parse(std::string_view text) {
  auto config = KeyValueConfig::Parse(text);
  if (!config.ok()) return Status(ErrorCode::kBadConfig, config.status().message());
  auto s = FromConfig(*config);
  RAAS_RETURN_IF_ERROR(s.status());
  auto unknown = config->RejectUnknown();
  if (!unknown.ok()) return Status(ErrorCode::kBadConfig, unknown.message());
  return s;
}

Result<BenchScenario> BenchScenario::Load(const std::string& path) {
  auto config = KeyValueConfig::Load(path);
  if (!config.ok()) return Status(ErrorCode::kBadConfig, config.status().message());
  auto s = FromConfig(*config);
  RAAS_RETURN_IF_ERROR(s.status());
  auto unknown = config->RejectUnknown();
  if (!unknown.ok()) return Status(ErrorCode::kBadConfig, unknown.message());
  return s;
}

Status BenchScenario::Validate() const {
  if (connections.empty()) {
    return Status(ErrorCode::kBadConfig, "connections list is empty");
  }
  if (connections.front() == 0) {
    return Status(ErrorCode::kBadConfig, "connection counts must be positive");
  }
  for (size_t i = 1; i < connections.size(); ++i) {
    if (connections[i] <= connections[i - 1]) {
      return Status(ErrorCode::kBadConfig,
                    "connections must be strictly increasing");
    }
  }
  if (q == 0) return Status(ErrorCode::kBadConfig, "q must be at least 1");
  if (mode != Mode::kLocked && q != 1) {
    return Status(ErrorCode::kBadConfig, "q applies to locked mode only");
  }
  if (threads == 0 || workers == 0) {
    return Status(ErrorCode::kBadConfig, "threads and workers must be positive");
  }
  if (msg_size == 0) return Status(ErrorCode::kBadConfig, "msg_size is zero");
  if (!(duration_s > 0.0) || duration_s > 10.0) {
    return Status(ErrorCode::kBadConfig, "duration must be in (0, 10] seconds");
  }
  if (batching_window == 0) {
    return Status(ErrorCode::kBadConfig, "batching_window must be positive");
  }
  return fabric.Validate();
}

}  // namespace raas::bench
