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

#ifndef RAAS_DAEMON_POLICY_H_
#define RAAS_DAEMON_POLICY_H_

#include <cstdint>

#include "raas/common/config.h"
#include "raas/common/status.h"
#include "raas/daemon/flags.h"
#include "raas/verbs/types.h"

namespace raas {

struct LoadStats {
  double cpu_load = 0.0;  // [0, 1]
  uint64_t mem_used = 0;  // registered bytes on the node
};

struct PolicyConfig {
  uint64_t small_msg_threshold = 4096;
  double cpu_high_watermark = 0.7;
  uint64_t copy_register_crossover = 64 * 1024;
  uint32_t batching_window = 16;

  Status Validate() const;
  // Reads small_msg_threshold, cpu_high_watermark, copy_register_crossover,
  // batching_window. Absent keys keep their current values.
  Status FromConfig(KeyValueConfig& config);
};

struct Path {
  verbs::TransportMode mode = verbs::TransportMode::kRC;
  verbs::Verb verb = verbs::Verb::kSend;
  friend bool operator==(const Path&, const Path&) = default;
};

// Picks the transport and verb for one request. Explicit flag fields are
// returned unchanged; DEFAULT transport means RC. With AUTO verb, requests
// carrying Flags::kInbound always READ; outbound ones SEND up to the
// threshold and WRITE above it.
Result<Path> SelectPath(uint64_t len, Flags flags, const LoadStats& local,
                        const LoadStats& remote, const PolicyConfig& policy);

enum class BufferStrategy : uint8_t { kMemcpy, kMemreg };

// kMemcpy iff len < crossover.
BufferStrategy CopyOrRegister(uint64_t len, const PolicyConfig& policy);

}  // namespace raas

#endif  // RAAS_DAEMON_POLICY_H_
