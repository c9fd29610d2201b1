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

#ifndef RAAS_DAEMON_ADDR_H_
#define RAAS_DAEMON_ADDR_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "raas/common/status.h"

namespace raas {

// Host address: IPv4, IPv6, or an RDMA (GID, LID) pair.
// Textual forms: `ipv4:10.0.0.1`, `ipv6:[fe80::1]`, `rdma:fe80::2/17`.
struct Addr {
  enum class Kind : uint8_t { kIpv4, kIpv6, kRdma };

  Kind kind = Kind::kIpv4;
  uint32_t ipv4 = 0;  // host byte order
  std::array<uint8_t, 16> ipv6{};
  std::array<uint8_t, 16> gid{};
  uint16_t lid = 0;

  static Result<Addr> Parse(std::string_view text);
  static Addr Ipv4(uint32_t host_order);

  std::string ToString() const;
  // Identifies the machine behind the address; the LID is a port-local
  // routing detail and does not take part.
  std::string NodeKey() const;

  friend bool operator==(const Addr&, const Addr&) = default;
};

}  // namespace raas

#endif  // RAAS_DAEMON_ADDR_H_
