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

#include "raas/verbs/nic_model.h"

#include <cmath>

namespace raas::verbs {

std::string_view TransportName(TransportMode mode) {
  switch (mode) {
    case TransportMode::kRC: return "RC";
    case TransportMode::kUC: return "UC";
    case TransportMode::kUD: return "UD";
  }
  return "?";
}

std::string_view VerbName(Verb verb) {
  switch (verb) {
    case Verb::kSend: return "SEND";
    case Verb::kRecv: return "RECV";
    case Verb::kWrite: return "WRITE";
    case Verb::kRead: return "READ";
  }
  return "?";
}

NicModel::NicModel(NicCostConfig config) : config_(config) {}

NicServiceResult NicModel::Service(QpId qp) {
  if (auto it = index_.find(qp); it != index_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second);
    ++counters_.hits;
    return {config_.hit_cost_ns, true};
  }
  ++counters_.misses;
  if (config_.cache_capacity == 0) return {config_.miss_cost_ns, false};
  if (lru_.size() >= config_.cache_capacity) {
    index_.erase(lru_.back());
    lru_.pop_back();
    ++counters_.evictions;
  }
  lru_.push_front(qp);
  index_[qp] = lru_.begin();
  return {config_.miss_cost_ns, false};
}

NicServiceResult NicModel::ServiceWorkRequest(QpId qp, uint64_t bytes,
                                              bool batched) {
  NicServiceResult r = Service(qp);
  double fixed = static_cast<double>(r.cost_ns);
  if (batched) fixed *= config_.batch_discount;
  const double wire = config_.per_byte_ns * static_cast<double>(bytes);
  r.cost_ns = static_cast<uint64_t>(std::llround(fixed + wire));
  return r;
}

void NicModel::Forget(QpId qp) {
  if (auto it = index_.find(qp); it != index_.end()) {
    lru_.erase(it->second);
    index_.erase(it);
  }
}

}  // namespace raas::verbs
