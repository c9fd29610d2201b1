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

#include "raas/daemon/vqpn.h"

namespace raas {

using verbs::CompletionEntry;
using verbs::CompletionSide;
using verbs::TransportMode;
using verbs::Verb;
using verbs::WorkRequest;

Result<WorkRequest> EncodeWr(uint32_t vqpn, uint32_t seq, TransportMode mode,
                             Verb verb, const verbs::LocalSlice& local,
                             std::optional<verbs::RemoteSlice> remote) {
  if (verb == Verb::kRecv || !verbs::IsLegal(mode, verb)) {
    return Status(ErrorCode::kIllegalVerb, "verb not legal on this transport");
  }
  if (verbs::IsOneSided(verb) != remote.has_value()) {
    return Status(ErrorCode::kInvalidArgument,
                  "remote slice required exactly for one-sided verbs");
  }
  WorkRequest wr;
  wr.wr_id = PackWrId(vqpn, seq);
  wr.verb = verb;
  wr.local = local;
  wr.remote = remote;
  if (verb == Verb::kSend) wr.imm_data = vqpn;
  return wr;
}

std::optional<uint32_t> VqpnOfCompletion(const CompletionEntry& cqe) {
  if (cqe.side == CompletionSide::kRecv) {
    if (!cqe.imm_data.has_value()) return std::nullopt;
    return *cqe.imm_data;
  }
  return UnpackWrId(cqe.wr_id).vqpn;
}

VqpnAllocator::VqpnAllocator(uint64_t limit)
    : limit_(limit > UINT32_MAX ? UINT32_MAX : limit) {}

Result<uint32_t> VqpnAllocator::Allocate() {
  std::lock_guard lock(mu_);
  uint32_t id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
  } else if (next_ <= limit_) {
    id = static_cast<uint32_t>(next_++);
  } else {
    return Status(ErrorCode::kVqpnExhausted, "no free vqpn");
  }
  ++in_use_;
  return id;
}

void VqpnAllocator::Release(uint32_t vqpn) {
  std::lock_guard lock(mu_);
  free_.push_back(vqpn);
  --in_use_;
}

uint64_t VqpnAllocator::in_use() const {
  std::lock_guard lock(mu_);
  return in_use_;
}

}  // namespace raas
