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

#include "raas/daemon/policy.h"

namespace raas {

using verbs::TransportMode;
using verbs::Verb;

Status PolicyConfig::Validate() const {
  if (small_msg_threshold == 0 || copy_register_crossover == 0 ||
      batching_window == 0) {
    return Status(ErrorCode::kBadConfig, "policy thresholds must be positive");
  }
  if (!(cpu_high_watermark > 0.0 && cpu_high_watermark <= 1.0)) {
    return Status(ErrorCode::kBadConfig, "cpu_high_watermark out of (0, 1]");
  }
  if (copy_register_crossover < small_msg_threshold) {
    return Status(ErrorCode::kBadConfig,
                  "copy_register_crossover below small_msg_threshold");
  }
  return Status::Ok();
}

Status PolicyConfig::FromConfig(KeyValueConfig& config) {
  RAAS_RETURN_IF_ERROR(config.TakeUint("small_msg_threshold", small_msg_threshold));
  RAAS_RETURN_IF_ERROR(config.TakeDouble("cpu_high_watermark", cpu_high_watermark));
  RAAS_RETURN_IF_ERROR(
      config.TakeUint("copy_register_crossover", copy_register_crossover));
  uint64_t window = batching_window;
  RAAS_RETURN_IF_ERROR(config.TakeUint("batching_window", window));
  if (window > UINT32_MAX) {
    return Status(ErrorCode::kBadConfig, "batching_window too large");
  }
  batching_window = static_cast<uint32_t>(window);
  return Status::Ok();
}

Result<Path> SelectPath(uint64_t len, Flags flags, const LoadStats& local,
                        const LoadStats& remote, const PolicyConfig& policy) {
  (void)local;
  (void)remote;
  RAAS_RETURN_IF_ERROR(flags.Validate());
  Path path;
  path.mode = flags.transport().value_or(TransportMode::kRC);
  if (const auto verb = flags.verb(); verb.has_value()) {
    path.verb = *verb;
    return path;
  }
  if (path.mode == TransportMode::kUD) {
    path.verb = Verb::kSend;
    return path;
  }
  if (flags.inbound()) {
    path.verb = Verb::kRead;
  } else if (len <= policy.small_msg_threshold) {
    path.verb = Verb::kSend;
  } else {
    // WRITE bypasses a loaded receiver's CPU, and with an idle receiver
    // the daemon is still the initiator, so both cases land here.
    path.verb = Verb::kWrite;
  }
  return path;
}

BufferStrategy CopyOrRegister(uint64_t len, const PolicyConfig& policy) {
  return len < policy.copy_register_crossover ? BufferStrategy::kMemcpy
                                              : BufferStrategy::kMemreg;
}

}  // namespace raas
