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

#ifndef RAAS_VERBS_NIC_MODEL_H_
#define RAAS_VERBS_NIC_MODEL_H_

#include <cstdint>
#include <list>
#include <unordered_map>

#include "raas/verbs/types.h"

namespace raas::verbs {

struct NicCostConfig {
  uint32_t cache_capacity = 400;
  uint64_t hit_cost_ns = 200;
  uint64_t miss_cost_ns = 1200;
  double per_byte_ns = 0.025;
  double batch_discount = 0.6;
  uint32_t mtu = 4096;
};

struct NicServiceResult {
  uint64_t cost_ns = 0;
  bool hit = false;
};

struct NicCounters {
  uint64_t hits = 0;
  uint64_t misses = 0;
  uint64_t evictions = 0;

  double hit_rate() const {
    const uint64_t total = hits + misses;
    return total == 0 ? 0.0 : static_cast<double>(hits) / total;
  }
};

// On-adapter QP context cache with LRU replacement. Every work request the
// NIC processes looks up its QP context here; a miss costs a fetch from host
// memory.
class NicModel {
 public:
  explicit NicModel(NicCostConfig config);

  // Returns the fixed lookup cost for `qp` and marks it most recently used,
  // evicting the least recently used context when the cache is full.
  NicServiceResult Service(QpId qp);

  // Fixed cost plus wire cost of one work request of `bytes` on `qp`.
  NicServiceResult ServiceWorkRequest(QpId qp, uint64_t bytes, bool batched);

  bool IsCached(QpId qp) const { return index_.count(qp) != 0; }
  size_t occupancy() const { return lru_.size(); }
  void Forget(QpId qp);

  const NicCostConfig& config() const { return config_; }
  const NicCounters& counters() const { return counters_; }
  void ResetCounters() { counters_ = {}; }

 private:
  NicCostConfig config_;
  std::list<QpId> lru_;  // front = most recently used
  std::unordered_map<QpId, std::list<QpId>::iterator> index_;
  NicCounters counters_;
};

}  // namespace raas::verbs

#endif  // RAAS_VERBS_NIC_MODEL_H_
