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

#ifndef RAAS_IPC_RECORDS_H_
#define RAAS_IPC_RECORDS_H_

#include <array>
#include <cstddef>
#include <cstdint>

#include "raas/common/status.h"

namespace raas::ipc {

// Application <-> daemon record ABI. Both records are exactly 40 bytes,
// little-endian, no implicit padding:
//
//   RequestRecord                      ResponseRecord
//   off  size  field                   off  size  field
//    0    1    op                       0    1    op (echoed)
//    1    3    pad (zero)               1    1    status (ErrorCode)
//    4    4    fd                       2    2    pad (zero)
//    8    4    region                   4    4    fd
//   12    8    offset                   8    4    region  (0 = no payload)
//   20    8    length                  12    8    offset
//   28    4    flags                   20    8    length  (byte count)
//   32    8    seq                     28    4    flags   (path taken)
//                                      32    8    seq
//
// Payloads never travel inline; `region` names a registered buffer and
// (offset, length) a slice of it.
inline constexpr size_t kRecordBytes = 40;
using WireRecord = std::array<std::byte, kRecordBytes>;

enum class RequestOp : uint8_t {
  kConnect = 1,
  kSend = 2,
  kRecvReady = 3,
  kClose = 4,
};

// Inbound data notifications travel in ResponseRecords with this op; their
// seq is a per-fd delivery counter chosen by the daemon.
inline constexpr uint8_t kInboundDataOp = 0x10;
// The peer closed the connection; no payload.
inline constexpr uint8_t kPeerClosedOp = 0x11;

struct RequestRecord {
  RequestOp op = RequestOp::kSend;
  uint32_t fd = 0;
  uint32_t region = 0;
  uint64_t offset = 0;
  uint64_t length = 0;
  uint32_t flags = 0;
  uint64_t seq = 0;

  friend bool operator==(const RequestRecord&, const RequestRecord&) = default;
};

struct ResponseRecord {
  uint8_t op = 0;
  ErrorCode status = ErrorCode::kOk;
  uint32_t fd = 0;
  uint32_t region = 0;
  uint64_t offset = 0;
  uint64_t length = 0;
  uint32_t flags = 0;
  uint64_t seq = 0;

  bool has_payload() const { return region != 0; }
  friend bool operator==(const ResponseRecord&, const ResponseRecord&) = default;
};

WireRecord Encode(const RequestRecord& record);
WireRecord Encode(const ResponseRecord& record);
Result<RequestRecord> DecodeRequest(const WireRecord& wire);
Result<ResponseRecord> DecodeResponse(const WireRecord& wire);

}  // namespace raas::ipc

#endif  // RAAS_IPC_RECORDS_H_
