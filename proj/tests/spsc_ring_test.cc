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

#include "raas/ipc/spsc_ring.h"

#include <chrono>

#include "gtest/gtest.h"
#include "ipc_stress.h"
#include "raas/ipc/event_channel.h"

namespace raas::ipc {
namespace {

TEST(SpscRingTest, CreateValidatesCapacity) {
  auto ring = SpscRing<int>::Create(8);
  ASSERT_TRUE(ring.ok());
  EXPECT_EQ((*ring)->size(), 0u);
  EXPECT_EQ((*ring)->usable_capacity(), 7u);
  EXPECT_EQ(SpscRing<int>::Create(7).code(), ErrorCode::kBadCapacity);
  EXPECT_EQ(SpscRing<int>::Create(0).code(), ErrorCode::kBadCapacity);
  EXPECT_EQ(SpscRing<int>::Create(1).code(), ErrorCode::kBadCapacity);
}

TEST(SpscRingTest, SmallestRingHoldsOne) {
  auto ring = *SpscRing<int>::Create(2);
  EXPECT_TRUE(ring->TryPush(1));
  EXPECT_FALSE(ring->TryPush(2));
  EXPECT_EQ(ring->TryPop(), 1);
  EXPECT_TRUE(ring->TryPush(3));
}

TEST(SpscRingTest, FullRingRejectsWithoutChange) {
  auto ring = *SpscRing<int>::Create(4);
  EXPECT_TRUE(ring->TryPush(10));
  EXPECT_TRUE(ring->TryPush(11));
  EXPECT_TRUE(ring->TryPush(12));
  EXPECT_FALSE(ring->TryPush(13));
  EXPECT_EQ(ring->size(), 3u);
  EXPECT_EQ(ring->TryPop(), 10);
  EXPECT_EQ(ring->TryPop(), 11);
  EXPECT_EQ(ring->TryPop(), 12);
  EXPECT_EQ(ring->TryPop(), std::nullopt);
}

TEST(SpscRingTest, FifoAcrossWraparound) {
  auto ring = *SpscRing<int>::Create(4);
  int next_in = 0, next_out = 0;
  for (int round = 0; round < 50; ++round) {
    while (ring->TryPush(next_in)) ++next_in;
    for (int i = 0; i < 2; ++i) EXPECT_EQ(ring->TryPop(), next_out++);
  }
  while (auto v = ring->TryPop()) EXPECT_EQ(*v, next_out++);
  EXPECT_EQ(next_in, next_out);
}

TEST(SpscRingTest, TwoThreadStressMatchesFifoOracle) {
  const auto r = testing::RunFifoStress(1'000'000, 256);
  EXPECT_EQ(r.received, 1'000'000u);
  EXPECT_EQ(r.mismatches, 0u);
}

TEST(SpscRingTest, ProgressWithParkedPeer) {
  const auto r = testing::RunObstructionCheck(100'000);
  EXPECT_EQ(r.consumer_ops, 100'000u);
  EXPECT_EQ(r.producer_ops, 100'000u);
  // Generous: a preempted call can take a scheduler tick, never a wait on
  // the peer.
  EXPECT_LT(r.worst_op, std::chrono::milliseconds(200));
}

TEST(EventChannelTest, SignalThenWaitWakes) {
  auto ch = *EventChannel::Create();
  ch.Signal();
  EXPECT_TRUE(ch.Wait(std::chrono::milliseconds(10)).ok());
}

TEST(EventChannelTest, WaitTimesOut) {
  auto ch = *EventChannel::Create();
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_EQ(ch.Wait(std::chrono::milliseconds(10)).code(), ErrorCode::kTimeout);
  EXPECT_GE(std::chrono::steady_clock::now() - t0, std::chrono::milliseconds(10));
}

TEST(EventChannelTest, CountsSignals) {
  auto ch = *EventChannel::Create();
  constexpr int kSignals = 5;
  for (int i = 0; i < kSignals; ++i) ch.Signal();
  int woke = 0;
  for (int i = 0; i < kSignals + 1; ++i) {
    if (ch.Wait(std::chrono::microseconds(0)).ok()) ++woke;
  }
  EXPECT_EQ(woke, kSignals);
}

TEST(EventChannelTest, CrossThreadWakeup) {
  auto ch = *EventChannel::Create();
  std::thread t([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    ch.Signal();
  });
  EXPECT_TRUE(ch.Wait(std::chrono::seconds(5)).ok());
  t.join();
}

TEST(EventChannelTest, NoLostWakeups) {
  const auto r = testing::RunLostWakeupCheck(100'000, 7);
  EXPECT_EQ(r.sent, r.received);
  EXPECT_EQ(r.stalls, 0u);
}

}  // namespace
}  // namespace raas::ipc
