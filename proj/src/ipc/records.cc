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

#include "raas/ipc/records.h"

namespace raas::ipc {
namespace {

template <typename T>
void Put(WireRecord& w, size_t off, T v) {
  for (size_t i = 0; i < sizeof(T); ++i) {
    w[off + i] = static_cast<std::byte>((static_cast<uint64_t>(v) >> (8 * i)) & 0xFF);
  }
}

template <typename T>
T Get(const WireRecord& w, size_t off) {
  uint64_t v = 0;
  for (size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<uint64_t>(w[off + i]) << (8 * i);
  }
  return static_cast<T>(v);
}

bool AllZero(const WireRecord& w, size_t off, size_t len) {
  for (size_t i = off; i < off + len; ++i) {
    if (w[i] != std::byte{0}) return false;
  }
  return true;
}

}  // namespace

WireRecord Encode(const RequestRecord& r) {
  WireRecord w{};
  Put<uint8_t>(w, 0, static_cast<uint8_t>(r.op));
  Put<uint32_t>(w, 4, r.fd);
  Put<uint32_t>(w, 8, r.region);
  Put<uint64_t>(w, 12, r.offset);
  Put<uint64_t>(w, 20, r.length);
  Put<uint32_t>(w, 28, r.flags);
  Put<uint64_t>(w, 32, r.seq);
  return w;
}

WireRecord Encode(const ResponseRecord& r) {
  WireRecord w{};
  Put<uint8_t>(w, 0, r.op);
  Put<uint8_t>(w, 1, static_cast<uint8_t>(r.status));
  Put<uint32_t>(w, 4, r.fd);
  Put<uint32_t>(w, 8, r.region);
  Put<uint64_t>(w, 12, r.offset);
  Put<uint64_t>(w, 20, r.length);
  Put<uint32_t>(w, 28, r.flags);
  Put<uint64_t>(w, 32, r.seq);
  return w;
}

Result<RequestRecord> DecodeRequest(const WireRecord& w) {
  const auto op = Get<uint8_t>(w, 0);
  if (op < static_cast<uint8_t>(RequestOp::kConnect) ||
      op > static_cast<uint8_t>(RequestOp::kClose)) {
    return Status(ErrorCode::kParseError, "unknown request op");
  }
  if (!AllZero(w, 1, 3)) return Status(ErrorCode::kParseError, "nonzero pad");
  RequestRecord r;
  r.op = static_cast<RequestOp>(op);
  r.fd = Get<uint32_t>(w, 4);
  r.region = Get<uint32_t>(w, 8);
  r.offset = Get<uint64_t>(w, 12);
  r.length = Get<uint64_t>(w, 20);
  r.flags = Get<uint32_t>(w, 28);
  r.seq = Get<uint64_t>(w, 32);
  return r;
}

Result<ResponseRecord> DecodeResponse(const WireRecord& w) {
  if (!AllZero(w, 2, 2)) return Status(ErrorCode::kParseError, "nonzero pad");
  const auto status = Get<uint8_t>(w, 1);
  if (status > static_cast<uint8_t>(ErrorCode::kParseError)) {
    return Status(ErrorCode::kParseError, "unknown status");
  }
  ResponseRecord r;
  r.op = Get<uint8_t>(w, 0);
  r.status = static_cast<ErrorCode>(status);
  r.fd = Get<uint32_t>(w, 4);
  r.region = Get<uint32_t>(w, 8);
  r.offset = Get<uint64_t>(w, 12);
  r.length = Get<uint64_t>(w, 20);
  r.flags = Get<uint32_t>(w, 28);
  r.seq = Get<uint64_t>(w, 32);
  return r;
}

}  // namespace raas::ipc
