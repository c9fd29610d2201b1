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

#ifndef RAAS_DAEMON_VQPN_H_
#define RAAS_DAEMON_VQPN_H_

#include <cstdint>
#include <mutex>
#include <optional>
#include <vector>

#include "raas/common/status.h"
#include "raas/verbs/types.h"

namespace raas {

// wr_id layout: low 32 bits vqpn, high 32 bits per-connection sequence.
constexpr uint64_t PackWrId(uint32_t vqpn, uint32_t seq) {
  return (static_cast<uint64_t>(seq) << 32) | vqpn;
}

struct WrTag {
  uint32_t vqpn = 0;
  uint32_t seq = 0;
  friend bool operator==(const WrTag&, const WrTag&) = default;
};

constexpr WrTag UnpackWrId(uint64_t wr_id) {
  return WrTag{static_cast<uint32_t>(wr_id),
               static_cast<uint32_t>(wr_id >> 32)};
}

// Builds the WR for one request on a virtual connection. SEND also carries
// the vqpn in imm_data so the receiving side can demultiplex it.
Result<verbs::WorkRequest> EncodeWr(
    uint32_t vqpn, uint32_t seq, verbs::TransportMode mode, verbs::Verb verb,
    const verbs::LocalSlice& local,
    std::optional<verbs::RemoteSlice> remote = std::nullopt);

// Recovers the vqpn a completion belongs to: imm_data for inbound SENDs,
// the wr_id tag for everything completing on the initiator.
std::optional<uint32_t> VqpnOfCompletion(const verbs::CompletionEntry& cqe);

// Hands out vqpns in [1, limit]; 0 is never issued. Released ids are
// reused only after release.
class VqpnAllocator {
 public:
  explicit VqpnAllocator(uint64_t limit = UINT32_MAX);

  Result<uint32_t> Allocate();
  void Release(uint32_t vqpn);
  uint64_t in_use() const;

 private:
  mutable std::mutex mu_;
  uint64_t limit_;
  uint64_t next_ = 1;
  std::vector<uint32_t> free_;
  uint64_t in_use_ = 0;
};

}  // namespace raas

#endif  // RAAS_DAEMON_VQPN_H_
