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

#include <random>

#include "gtest/gtest.h"

namespace raas::ipc {
namespace {

TEST(RecordsTest, RequestLayoutIsByteExact) {
  RequestRecord r;
  r.op = RequestOp::kSend;
  r.fd = 0x04030201;
  r.region = 0x08070605;
  r.offset = 0x100F0E0D0C0B0A09;
  r.length = 0x1817161514131211;
  r.flags = 0x1C1B1A19;
  r.seq = 0x24232221201F1E1D;
  const WireRecord w = Encode(r);
  const uint8_t expected[kRecordBytes] = {
      0x02, 0, 0, 0,                                   // op, pad
      0x01, 0x02, 0x03, 0x04,                          // fd
      0x05, 0x06, 0x07, 0x08,                          // region
      0x09, 0x0A, 0x0B, 0x0C, 0x0D, 0x0E, 0x0F, 0x10,  // offset
      0x11, 0x12, 0x13, 0x14, 0x15, 0x16, 0x17, 0x18,  // length
      0x19, 0x1A, 0x1B, 0x1C,                          // flags
      0x1D, 0x1E, 0x1F, 0x20, 0x21, 0x22, 0x23, 0x24,  // seq
  };
  for (size_t i = 0; i < kRecordBytes; ++i) {
    EXPECT_EQ(static_cast<uint8_t>(w[i]), expected[i]) << "byte " << i;
  }
}

TEST(RecordsTest, ResponseLayoutIsByteExact) {
  ResponseRecord r;
  r.op = kInboundDataOp;
  r.status = ErrorCode::kBadFd;
  r.fd = 7;
  r.region = 9;
  r.offset = 0x0102;
  r.length = 65536;
  r.flags = 0x12;
  r.seq = 3;
  const WireRecord w = Encode(r);
  EXPECT_EQ(static_cast<uint8_t>(w[0]), 0x10);
  EXPECT_EQ(static_cast<uint8_t>(w[1]), static_cast<uint8_t>(ErrorCode::kBadFd));
  EXPECT_EQ(static_cast<uint8_t>(w[2]), 0);
  EXPECT_EQ(static_cast<uint8_t>(w[4]), 7);
  EXPECT_EQ(static_cast<uint8_t>(w[8]), 9);
  EXPECT_EQ(static_cast<uint8_t>(w[12]), 0x02);
  EXPECT_EQ(static_cast<uint8_t>(w[13]), 0x01);
  EXPECT_EQ(static_cast<uint8_t>(w[22]), 0x01);  // 65536 = 0x10000
  EXPECT_EQ(static_cast<uint8_t>(w[28]), 0x12);
  EXPECT_EQ(static_cast<uint8_t>(w[32]), 3);
}

TEST(RecordsTest, RandomRecordsSurviveEncoding) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    RequestRecord req;
    req.op = static_cast<RequestOp>(1 + rng() % 4);
    req.fd = static_cast<uint32_t>(rng());
    req.region = static_cast<uint32_t>(rng());
    req.offset = rng();
    req.length = rng();
    req.flags = static_cast<uint32_t>(rng());
    req.seq = rng();
    EXPECT_EQ(*DecodeRequest(Encode(req)), req);

    ResponseRecord resp;
    resp.op = static_cast<uint8_t>(rng());
    resp.status = static_cast<ErrorCode>(rng() % 39);
    resp.fd = static_cast<uint32_t>(rng());
    resp.region = static_cast<uint32_t>(rng());
    resp.offset = rng();
    resp.length = rng();
    resp.flags = static_cast<uint32_t>(rng());
    resp.seq = rng();
    EXPECT_EQ(*DecodeResponse(Encode(resp)), resp);
  }
}

TEST(RecordsTest, RejectsGarbage) {
  WireRecord w{};
  EXPECT_EQ(DecodeRequest(w).code(), ErrorCode::kParseError);  // op 0
  w[0] = std::byte{2};
  w[2] = std::byte{1};
  EXPECT_EQ(DecodeRequest(w).code(), ErrorCode::kParseError);  // pad
  WireRecord r{};
  r[1] = std::byte{200};
  EXPECT_EQ(DecodeResponse(r).code(), ErrorCode::kParseError);
}

}  // namespace
}  // namespace raas::ipc
