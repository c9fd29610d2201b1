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

#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "lru_oracle.h"

namespace raas::verbs {
namespace {

using testing::BruteForceLru;

NicCostConfig Capacity(uint32_t capacity) {
  NicCostConfig c;
  c.cache_capacity = capacity;
  return c;
}

TEST(NicModelTest, EvictsLeastRecentlyUsed) {
  NicModel nic(Capacity(2));
  const NicCostConfig& c = nic.config();
  EXPECT_EQ(nic.Service(1).cost_ns, c.miss_cost_ns);
  EXPECT_EQ(nic.Service(2).cost_ns, c.miss_cost_ns);
  EXPECT_EQ(nic.Service(3).cost_ns, c.miss_cost_ns);
  EXPECT_EQ(nic.Service(1).cost_ns, c.miss_cost_ns);  // 1 was evicted by 3
  EXPECT_EQ(nic.counters().evictions, 2u);
}

TEST(NicModelTest, RecentAccessHits) {
  NicModel nic(Capacity(2));
  EXPECT_FALSE(nic.Service(1).hit);
  EXPECT_FALSE(nic.Service(2).hit);
  const NicServiceResult again = nic.Service(1);
  EXPECT_TRUE(again.hit);
  EXPECT_EQ(again.cost_ns, nic.config().hit_cost_ns);
}

TEST(NicModelTest, RoundRobinWithinCapacityIsAllHits) {
  NicModel nic(Capacity(400));
  for (QpId qp = 1; qp <= 400; ++qp) nic.Service(qp);
  nic.ResetCounters();
  for (int round = 0; round < 5; ++round) {
    for (QpId qp = 1; qp <= 400; ++qp) EXPECT_TRUE(nic.Service(qp).hit);
  }
  EXPECT_EQ(nic.counters().misses, 0u);
  EXPECT_EQ(nic.occupancy(), 400u);
}

TEST(NicModelTest, OccupancyNeverExceedsCapacity) {
  NicModel nic(Capacity(16));
  std::mt19937 rng(3);
  for (int i = 0; i < 5000; ++i) {
    nic.Service(rng() % 100);
    ASSERT_LE(nic.occupancy(), 16u);
  }
}

TEST(NicModelTest, MatchesBruteForceLruOnRandomTraces) {
  std::mt19937 rng(42);
  for (uint32_t capacity : {1u, 4u, 50u, 400u}) {
    std::uniform_int_distribution<QpId> pick(1, capacity * 2 + 3);
    std::vector<QpId> trace(4000);
    for (auto& qp : trace) qp = pick(rng);
    const std::vector<bool> expected = BruteForceLru(trace, capacity);
    NicModel nic(Capacity(capacity));
    for (size_t i = 0; i < trace.size(); ++i) {
      ASSERT_EQ(nic.Service(trace[i]).hit, expected[i])
          << "capacity " << capacity << " access " << i;
    }
  }
}

TEST(NicModelTest, BatchDiscountAppliesToFixedCostOnly) {
  NicCostConfig c;
  c.cache_capacity = 4;
  c.hit_cost_ns = 200;
  c.miss_cost_ns = 1200;
  c.per_byte_ns = 0.025;
  c.batch_discount = 0.6;
  NicModel nic(c);
  // 1200 * 0.6 + 65536 * 0.025 = 720 + 1638.4
  EXPECT_EQ(nic.ServiceWorkRequest(1, 65536, true).cost_ns, 2358u);
  // 200 + 1638.4
  EXPECT_EQ(nic.ServiceWorkRequest(1, 65536, false).cost_ns, 1838u);
}

// Mean fixed cost per WR over a cyclic workload never falls as the number
// of distinct QPs grows, and jumps once the working set exceeds the cache.
TEST(NicModelTest, MeanCostMonotoneInActiveQps) {
  constexpr uint32_t kCapacity = 64;
  double previous = 0;
  for (uint32_t active = 8; active <= 256; active += 8) {
    NicModel nic(Capacity(kCapacity));
    uint64_t total = 0;
    const int accesses = 20 * active;
    for (int i = 0; i < accesses; ++i) total += nic.Service(i % active).cost_ns;
    const double mean = static_cast<double>(total) / accesses;
    EXPECT_GE(mean, previous) << active;
    if (active > kCapacity && active - 8 <= kCapacity) {
      EXPECT_GT(mean, previous) << active;
    }
    previous = mean;
  }
}

}  // namespace
}  // namespace raas::verbs
