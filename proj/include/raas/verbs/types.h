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

#ifndef RAAS_VERBS_TYPES_H_
#define RAAS_VERBS_TYPES_H_

#include <cstdint>
#include <optional>
#include <string_view>

namespace raas::verbs {

enum class TransportMode : uint8_t { kRC, kUC, kUD };
enum class Verb : uint8_t { kSend, kRecv, kWrite, kRead };

inline constexpr uint64_t kConnectedMaxMessage = uint64_t{1} << 30;  // 1 GiB

// Which verbs a transport can carry:
//
//          SEND/RECV  WRITE  READ   max message
//     RC       y        y      y      1 GiB
//     UC       y        y      n      1 GiB
//     UD       y        n      n      MTU
constexpr bool IsLegal(TransportMode mode, Verb verb) {
  switch (verb) {
    case Verb::kSend:
    case Verb::kRecv:
      return true;
    case Verb::kWrite:
      return mode != TransportMode::kUD;
    case Verb::kRead:
      return mode == TransportMode::kRC;
  }
  return false;
}

constexpr uint64_t MaxMessageSize(TransportMode mode, uint32_t mtu) {
  return mode == TransportMode::kUD ? mtu : kConnectedMaxMessage;
}

constexpr bool IsOneSided(Verb verb) {
  return verb == Verb::kWrite || verb == Verb::kRead;
}

std::string_view TransportName(TransportMode mode);
std::string_view VerbName(Verb verb);

using NodeId = uint32_t;
using QpId = uint32_t;
using CqId = uint32_t;
using SrqId = uint32_t;
using MrId = uint32_t;

struct MemoryRegion {
  MrId id = 0;
  NodeId node = 0;
  uint64_t base = 0;  // byte offset into the node's arena
  uint64_t length = 0;
  uint32_t local_key = 0;
  uint32_t remote_key = 0;
  uint64_t registered_at_ns = 0;
};

struct LocalSlice {
  MrId mr = 0;
  uint64_t offset = 0;  // relative to the region start
  uint64_t length = 0;
};

struct RemoteSlice {
  uint32_t remote_key = 0;
  uint64_t offset = 0;  // relative to the remote region start
};

// UD has no connection; every WR names its target queue pair.
struct UdDestination {
  NodeId node = 0;
  QpId qp = 0;
};

struct WorkRequest {
  uint64_t wr_id = 0;
  Verb verb = Verb::kSend;
  LocalSlice local;
  std::optional<RemoteSlice> remote;
  std::optional<uint32_t> imm_data;
  bool signaled = true;
  std::optional<UdDestination> ud_destination;
};

enum class CompletionStatus : uint8_t {
  kSuccess,
  kRnrError,
  kRemoteAccessError,
  kLengthError,
  // Peer queue pair or local region vanished before the WR executed.
  kTransportError,
};

enum class CompletionSide : uint8_t { kSend, kRecv };

struct CompletionEntry {
  uint64_t wr_id = 0;
  CompletionStatus status = CompletionStatus::kSuccess;
  uint64_t byte_count = 0;
  std::optional<uint32_t> imm_data;
  QpId qp_id = 0;
  CompletionSide side = CompletionSide::kSend;
  Verb verb = Verb::kSend;
  uint64_t timestamp_ns = 0;
  // Set on receive completions: the sending queue pair and its node.
  NodeId source_node = 0;
  QpId source_qp = 0;
};

enum class QpState : uint8_t { kReset, kReady };

struct QpInfo {
  QpId id = 0;
  NodeId node = 0;
  TransportMode mode = TransportMode::kRC;
  QpState state = QpState::kReset;
  std::optional<QpId> peer;
  CqId cq = 0;
  std::optional<SrqId> srq;
};

}  // namespace raas::verbs

#endif  // RAAS_VERBS_TYPES_H_
