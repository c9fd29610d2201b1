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

#ifndef RAAS_BENCH_SCENARIO_H_
#define RAAS_BENCH_SCENARIO_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "raas/common/config.h"
#include "raas/common/status.h"
#include "raas/verbs/fabric.h"

namespace raas::bench {

enum class Mode : uint8_t {
  kNaive,   // one QP per connection, posted directly by the application
  kRaas,    // connections multiplexed through the daemon
  kLocked,  // q application threads share each QP behind a mutex
};

std::string_view ModeName(Mode mode);
Result<Mode> ParseMode(std::string_view text);

struct BenchScenario {
  std::string name = "scenario";
  Mode mode = Mode::kRaas;
  // Sweep points. For resource runs each connection is its own application.
  std::vector<uint32_t> connections = {100, 200, 300, 400, 500,
                                       600, 700, 800, 900, 1000};
  uint32_t q = 1;         // threads per QP (locked mode only)
  uint32_t threads = 8;   // application threads (locked mode)
  uint32_t workers = 1;   // daemon worker threads (raas mode)
  uint64_t msg_size = 65536;
  verbs::Verb op = verbs::Verb::kRead;
  double duration_s = 0.02;  // simulated seconds measured per sweep point
  uint64_t seed = 1;

  // Model parameters.
  verbs::FabricConfig fabric;
  uint32_t batching_window = 16;
  uint64_t lock_penalty_ns = 3000;  // per contended acquisition
  uint64_t lock_hold_ns = 200;      // critical section of one post
  uint64_t app_request_ns = 1000;   // application CPU to issue one request
  uint64_t worker_request_ns = 300;
  uint64_t object_bytes = 4096;     // memory charged per QP, CQ and SRQ

  static Result<BenchScenario> Parse(std::string_view text);
  static Result<BenchScenario> Load(const std::string& path);
  // Reads scenario keys from `config`, leaving unknown keys to the caller.
  static Result<BenchScenario> FromConfig(KeyValueConfig& config);
  Status Validate() const;
  uint64_t duration_ns() const {
    return static_cast<uint64_t>(duration_s * 1e9);
  }
};

}  // namespace raas::bench

#endif  // RAAS_BENCH_SCENARIO_H_
