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

#include "raas/daemon/addr.h"

#include <arpa/inet.h>

#include <charconv>
#include <cstring>

namespace raas {
namespace {

std::string Ipv6Text(const std::array<uint8_t, 16>& bytes) {
  char buf[INET6_ADDRSTRLEN] = {};
  inet_ntop(AF_INET6, bytes.data(), buf, sizeof(buf));
  return buf;
}

bool ParseIpv6(std::string_view text, std::array<uint8_t, 16>& out) {
  const std::string s(text);
  return inet_pton(AF_INET6, s.c_str(), out.data()) == 1;
}

}  // namespace

Addr Addr::Ipv4(uint32_t host_order) {
  Addr a;
  a.kind = Kind::kIpv4;
  a.ipv4 = host_order;
  return a;
}

Result<Addr> Addr::Parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    return Status(ErrorCode::kParseError, "missing address family prefix");
  }
  const std::string_view family = text.substr(0, colon);
  const std::string_view rest = text.substr(colon + 1);
  Addr a;
  if (family == "ipv4") {
    in_addr in{};
    const std::string s(rest);
    if (inet_pton(AF_INET, s.c_str(), &in) != 1) {
      return Status(ErrorCode::kParseError, "bad ipv4 address");
    }
    a.kind = Kind::kIpv4;
    a.ipv4 = ntohl(in.s_addr);
    return a;
  }
  if (family == "ipv6") {
    if (rest.size() < 2 || rest.front() != '[' || rest.back() != ']' ||
        !ParseIpv6(rest.substr(1, rest.size() - 2), a.ipv6)) {
      return Status(ErrorCode::kParseError, "bad ipv6 address");
    }
    a.kind = Kind::kIpv6;
    return a;
  }
  if (family == "rdma") {
    const auto slash = rest.rfind('/');
    if (slash == std::string_view::npos ||
        !ParseIpv6(rest.substr(0, slash), a.gid)) {
      return Status(ErrorCode::kParseError, "bad rdma GID/LID");
    }
    const std::string_view lid = rest.substr(slash + 1);
    const auto [ptr, ec] =
        std::from_chars(lid.data(), lid.data() + lid.size(), a.lid);
    if (lid.empty() || ec != std::errc() || ptr != lid.data() + lid.size()) {
      return Status(ErrorCode::kParseError, "bad LID");
    }
    a.kind = Kind::kRdma;
    return a;
  }
  return Status(ErrorCode::kParseError, "unknown address family");
}

std::string Addr::ToString() const {
  switch (kind) {
    case Kind::kIpv4: {
      in_addr in{};
      in.s_addr = htonl(ipv4);
      char buf[INET_ADDRSTRLEN] = {};
      inet_ntop(AF_INET, &in, buf, sizeof(buf));
      return std::string("ipv4:") + buf;
    }
    case Kind::kIpv6:
      return "ipv6:[" + Ipv6Text(ipv6) + "]";
    case Kind::kRdma:
      return "rdma:" + Ipv6Text(gid) + "/" + std::to_string(lid);
  }
  return {};
}

std::string Addr::NodeKey() const {
  switch (kind) {
    case Kind::kIpv4:
    case Kind::kIpv6:
      return ToString();
    case Kind::kRdma:
      return "gid:" + Ipv6Text(gid);
  }
  return {};
}

}  // namespace raas
