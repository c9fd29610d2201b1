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

#include "raas/daemon/flags.h"

#include <bit>

namespace raas {

using verbs::TransportMode;
using verbs::Verb;

Result<Flags> Flags::Parse(std::string_view text) {
  uint32_t bits = 0;
  while (!text.empty()) {
    const auto bar = text.find('|');
    const std::string_view tok = text.substr(0, bar);
    text = bar == std::string_view::npos ? std::string_view{}
                                         : text.substr(bar + 1);
    if (tok == "RC") bits |= kRc;
    else if (tok == "UD") bits |= kUd;
    else if (tok == "SEND") bits |= kSend;
    else if (tok == "WRITE") bits |= kWrite;
    else if (tok == "READ") bits |= kRead;
    else if (tok == "INBOUND") bits |= kInbound;
    else if (tok == "DEFAULT" || tok == "AUTO") continue;
    else return Status(ErrorCode::kParseError, "unknown flag " + std::string(tok));
  }
  return Flags(bits);
}

std::optional<TransportMode> Flags::transport() const {
  switch (bits_ & kTransportMask) {
    case kRc: return TransportMode::kRC;
    case kUd: return TransportMode::kUD;
    default: return std::nullopt;
  }
}

std::optional<Verb> Flags::verb() const {
  switch (bits_ & kVerbMask) {
    case kSend: return Verb::kSend;
    case kWrite: return Verb::kWrite;
    case kRead: return Verb::kRead;
    default: return std::nullopt;
  }
}

Status Flags::Validate() const {
  if ((bits_ & ~kKnownMask) != 0) {
    return Status(ErrorCode::kContradictoryFlags, "unknown flag bits");
  }
  if (std::popcount(bits_ & kTransportMask) > 1 ||
      std::popcount(bits_ & kVerbMask) > 1) {
    return Status(ErrorCode::kContradictoryFlags,
                  "more than one transport or verb");
  }
  const auto t = transport();
  const auto v = verb();
  if (t.has_value() && v.has_value() && !verbs::IsLegal(*t, *v)) {
    return Status(ErrorCode::kContradictoryFlags, ToString());
  }
  return Status::Ok();
}

Flags Flags::Or(Flags fallback) const {
  uint32_t bits = bits_;
  if ((bits & kTransportMask) == 0) bits |= fallback.bits_ & kTransportMask;
  if ((bits & kVerbMask) == 0) bits |= fallback.bits_ & kVerbMask;
  return Flags(bits);
}

Flags Flags::Of(TransportMode mode, Verb verb) {
  uint32_t bits = mode == TransportMode::kUD ? kUd : kRc;
  switch (verb) {
    case Verb::kSend: bits |= kSend; break;
    case Verb::kWrite: bits |= kWrite; break;
    case Verb::kRead: bits |= kRead; break;
    case Verb::kRecv: break;
  }
  return Flags(bits);
}

std::string Flags::ToString() const {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += '|';
    out += name;
  };
  add(bits_ & kRc, "RC");
  add(bits_ & kUd, "UD");
  add(bits_ & kSend, "SEND");
  add(bits_ & kWrite, "WRITE");
  add(bits_ & kRead, "READ");
  add(bits_ & kInbound, "INBOUND");
  return out.empty() ? "DEFAULT" : out;
}

}  // namespace raas
