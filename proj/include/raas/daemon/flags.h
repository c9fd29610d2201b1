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

#ifndef RAAS_DAEMON_FLAGS_H_
#define RAAS_DAEMON_FLAGS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "raas/common/status.h"
#include "raas/verbs/types.h"

namespace raas {

// Per-request transport hints: at most one transport bit and one verb bit.
// No transport bit means DEFAULT, no verb bit means AUTO; DEFAULT|AUTO
// leaves the choice to the daemon's policy.
class Flags {
 public:
  static constexpr uint32_t kRc = 1u << 0;
  static constexpr uint32_t kUd = 1u << 1;
  static constexpr uint32_t kSend = 1u << 4;
  static constexpr uint32_t kWrite = 1u << 5;
  static constexpr uint32_t kRead = 1u << 6;
  // Request fetches data from the peer instead of pushing it.
  static constexpr uint32_t kInbound = 1u << 8;

  static constexpr uint32_t kTransportMask = kRc | kUd;
  static constexpr uint32_t kVerbMask = kSend | kWrite | kRead;
  static constexpr uint32_t kKnownMask = kTransportMask | kVerbMask | kInbound;

  constexpr Flags() = default;
  constexpr explicit Flags(uint32_t bits) : bits_(bits) {}

  static Flags Default() { return Flags(); }
  // "RC|WRITE", "DEFAULT", "UD|SEND", "AUTO", "INBOUND|READ"...
  static Result<Flags> Parse(std::string_view text);

  uint32_t bits() const { return bits_; }
  std::optional<verbs::TransportMode> transport() const;
  std::optional<verbs::Verb> verb() const;
  bool inbound() const { return (bits_ & kInbound) != 0; }
  bool is_default() const { return (bits_ & (kTransportMask | kVerbMask)) == 0; }

  // Fails with CONTRADICTORY_FLAGS when more than one bit of a group is
  // set, unknown bits are present, or the pair is not a legal transport
  // operation.
  Status Validate() const;

  // `*this` with DEFAULT/AUTO fields filled from `fallback`.
  Flags Or(Flags fallback) const;

  static Flags Of(verbs::TransportMode mode, verbs::Verb verb);
  std::string ToString() const;

  friend bool operator==(Flags, Flags) = default;

 private:
  uint32_t bits_ = 0;
};

}  // namespace raas

#endif  // RAAS_DAEMON_FLAGS_H_
