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

#include "raas/daemon/daemon.h"

#include <atomic>
#include <chrono>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include "daemon_harness.h"
#include "gtest/gtest.h"
#include "raas/common/config.h"
#include "raas/daemon/vqpn.h"

namespace raas {
namespace {

using testing::HostAddr;
using testing::OpenConnections;
using testing::RawConn;
using testing::TestCluster;
using namespace std::chrono_literals;

DaemonConfig Manual(uint32_t workers = 1) {
  DaemonConfig c;
  c.threaded = false;
  c.worker_count = workers;
  return c;
}

// Waits for one response on a threaded daemon.
std::optional<ipc::ResponseRecord> WaitPop(RawConn& c,
                                           std::chrono::milliseconds limit) {
  const auto deadline = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < deadline) {
    if (auto r = c.Pop()) return r;
    (void)c.ep.events->Wait(std::chrono::milliseconds(5));
  }
  return std::nullopt;
}

TEST(DaemonStartTest, ThreadedStartLaunchesWorkersAndPoller) {
  DaemonConfig config;
  config.worker_count = 4;
  TestCluster tc(1, config);
  EXPECT_EQ(tc.daemons[0]->live_threads(), 5u);
  tc.daemons[0]->Stop();
  EXPECT_EQ(tc.daemons[0]->live_threads(), 0u);
}

TEST(DaemonStartTest, SecondDaemonOnNodeIsRejected) {
  TestCluster tc(1, Manual());
  auto again = Daemon::Start(tc.cluster, tc.nodes[0], Manual());
  EXPECT_EQ(again.code(), ErrorCode::kDaemonExists);
}

TEST(DaemonStartTest, BadConfigAndUnknownNode) {
  verbs::Fabric fabric;
  Cluster cluster(fabric);
  auto node = *cluster.AddHost(HostAddr(0));
  DaemonConfig bad = Manual();
  bad.worker_count = 0;
  EXPECT_EQ(Daemon::Start(cluster, node, bad).code(), ErrorCode::kBadConfig);
  bad = Manual();
  bad.ring_capacity = 100;
  EXPECT_EQ(Daemon::Start(cluster, node, bad).code(), ErrorCode::kBadConfig);
  bad = Manual();
  bad.srq_low_watermark = bad.srq_depth + 1;
  EXPECT_EQ(Daemon::Start(cluster, node, bad).code(), ErrorCode::kBadConfig);
  EXPECT_EQ(Daemon::Start(cluster, node + 7, Manual()).code(),
            ErrorCode::kNodeUnknown);
}

TEST(DaemonStartTest, ConfigFileFields) {
  auto kv = *KeyValueConfig::Parse(
      "worker_count = 4\nqps_per_node = 1\nsrq_depth = 128\n"
      "srq_low_watermark = 32\nsmall_msg_threshold = 1024\n"
      "batching_window = 8\n");
  auto config = DaemonConfig::FromConfig(kv);
  ASSERT_TRUE(config.ok());
  EXPECT_TRUE(kv.RejectUnknown().ok());
  EXPECT_EQ(config->worker_count, 4u);
  EXPECT_EQ(config->shards(), 1u);
  EXPECT_EQ(config->srq_depth, 128u);
  EXPECT_EQ(config->policy.small_msg_threshold, 1024u);
  EXPECT_EQ(config->policy.batching_window, 8u);

  auto zero = *KeyValueConfig::Parse("worker_count = 0\n");
  EXPECT_EQ(DaemonConfig::FromConfig(zero).code(), ErrorCode::kBadConfig);
}

TEST(VqpnAllocTest, SameNodeSharesQpDifferentNodesDoNot) {
  TestCluster tc(3, Manual());
  Daemon& a = *tc.daemons[0];
  auto [to_b, b_side] = OpenConnections(tc, 0, 1, 2);
  auto [to_c, c_side] = OpenConnections(tc, 0, 2, 1);
  EXPECT_NE(to_b[0].ep.vqpn, to_b[1].ep.vqpn);
  EXPECT_EQ(a.SharedQpOf(to_b[0].ep.fd), a.SharedQpOf(to_b[1].ep.fd));
  EXPECT_NE(a.SharedQpOf(to_b[0].ep.fd), a.SharedQpOf(to_c[0].ep.fd));
  // Both ends of a connection agree on its vqpn.
  EXPECT_EQ(to_b[0].ep.vqpn, b_side[0].ep.vqpn);
  EXPECT_EQ(a.VqpnOfFd(to_b[1].ep.fd), to_b[1].ep.vqpn);
}

TEST(VqpnAllocTest, AddressKindsResolveToOneNode) {
  TestCluster tc(2, Manual());
  auto rdma = *Addr::Parse("rdma:fe80::1/7");
  auto rdma_other_lid = *Addr::Parse("rdma:fe80::1/9");
  ASSERT_TRUE(tc.cluster.AddAlias(rdma, tc.nodes[1]).ok());
  EXPECT_EQ(tc.cluster.AddAlias(*Addr::Parse("ipv4:10.9.9.9"), 99).code(),
            ErrorCode::kNodeUnknown);
  EXPECT_EQ(*tc.cluster.Resolve(rdma_other_lid), tc.nodes[1]);
  Daemon& a = *tc.daemons[0];
  const AppId app = a.RegisterApp();
  const AppId app_b = tc.daemons[1]->RegisterApp();
  // A listener binds one address; the shared QP is chosen by node.
  ASSERT_TRUE(tc.daemons[1]->Listen(app_b, HostAddr(1)).ok());
  ASSERT_TRUE(tc.daemons[1]->Listen(app_b, rdma).ok());
  auto by_ip = a.Connect(app, HostAddr(1), Flags());
  auto by_gid = a.Connect(app, rdma, Flags());
  ASSERT_TRUE(by_ip.ok());
  ASSERT_TRUE(by_gid.ok());
  EXPECT_EQ(a.SharedQpOf(by_ip->fd), a.SharedQpOf(by_gid->fd));
}

TEST(VqpnAllocTest, UnreachableDestinations) {
  TestCluster tc(2, Manual());
  Daemon& a = *tc.daemons[0];
  const AppId app = a.RegisterApp();
  EXPECT_EQ(a.Connect(app, *Addr::Parse("ipv4:192.168.1.1"), Flags()).code(),
            ErrorCode::kDestUnreachable);
  // Node exists but nobody listens there.
  EXPECT_EQ(a.Connect(app, HostAddr(1), Flags()).code(),
            ErrorCode::kDestUnreachable);
  // Same-node connections are not offered.
  ASSERT_TRUE(a.Listen(app, HostAddr(0)).ok());
  EXPECT_EQ(a.Connect(app, HostAddr(0), Flags()).code(),
            ErrorCode::kDestUnreachable);
  EXPECT_EQ(a.Connect(app, HostAddr(1), *Flags::Parse("UD|READ")).code(),
            ErrorCode::kContradictoryFlags);
}

TEST(VqpnAllocTest, SmallIdSpaceExhausts) {
  verbs::Fabric fabric;
  Cluster cluster(fabric, 4);
  auto na = *cluster.AddHost(HostAddr(0));
  auto nb = *cluster.AddHost(HostAddr(1));
  auto a = *Daemon::Start(cluster, na, Manual());
  auto b = *Daemon::Start(cluster, nb, Manual());
  const AppId app = a->RegisterApp();
  ASSERT_TRUE(b->Listen(b->RegisterApp(), HostAddr(1)).ok());
  std::set<uint32_t> seen;
  for (int i = 0; i < 4; ++i) {
    auto ep = a->Connect(app, HostAddr(1), Flags());
    ASSERT_TRUE(ep.ok());
    seen.insert(ep->vqpn);
  }
  EXPECT_EQ(seen.size(), 4u);
  EXPECT_EQ(a->Connect(app, HostAddr(1), Flags()).code(),
            ErrorCode::kVqpnExhausted);
  a->Stop();
  b->Stop();
}

TEST(WorkerDrainTest, SixteenSendsToOneNodeFormOneBatch) {
  TestCluster tc(2, Manual());
  Daemon& a = *tc.daemons[0];
  auto [out, in] = OpenConnections(tc, 0, 1, 4);
  auto mr = *a.RegisterAppMemory(a.RegisterApp(), 4096);
  for (int i = 0; i < 16; ++i) {
    ASSERT_NE(out[i % 4].PushSend(mr.id, kSendHeadroom, 64), 0u);
  }
  EXPECT_EQ(a.WorkerDrain(0), 16u);
  EXPECT_EQ(a.counters().batches, 1u);
  EXPECT_EQ(a.counters().posted_wrs, 16u);
  EXPECT_EQ(a.WorkerDrain(0), 0u);
}

TEST(WorkerDrainTest, EmptyRingsPostNothing) {
  TestCluster tc(2, Manual());
  OpenConnections(tc, 0, 1, 3);
  EXPECT_EQ(tc.daemons[0]->WorkerDrain(0), 0u);
  EXPECT_EQ(tc.daemons[0]->counters().batches, 0u);
}

TEST(WorkerDrainTest, TwoNodesTwoBatches) {
  TestCluster tc(3, Manual());
  Daemon& a = *tc.daemons[0];
  auto [to_b, b_side] = OpenConnections(tc, 0, 1, 1);
  auto [to_c, c_side] = OpenConnections(tc, 0, 2, 1);
  auto mr = *a.RegisterAppMemory(a.RegisterApp(), 4096);
  for (int i = 0; i < 3; ++i) {
    to_b[0].PushSend(mr.id, kSendHeadroom, 64);
    to_c[0].PushSend(mr.id, kSendHeadroom, 64);
  }
  EXPECT_EQ(a.WorkerDrain(0), 6u);
  EXPECT_EQ(a.counters().batches, 2u);
  EXPECT_NE(a.SharedQpOf(to_b[0].ep.fd), a.SharedQpOf(to_c[0].ep.fd));
}

TEST(WorkerDrainTest, BatchingWindowCapsEachDoorbell) {
  DaemonConfig config = Manual();
  config.policy.batching_window = 4;
  TestCluster tc(2, config);
  Daemon& a = *tc.daemons[0];
  auto [out, in] = OpenConnections(tc, 0, 1, 1);
  auto mr = *a.RegisterAppMemory(a.RegisterApp(), 4096);
  for (int i = 0; i < 10; ++i) out[0].PushSend(mr.id, kSendHeadroom, 64);
  size_t posted = 0;
  while (size_t n = a.WorkerDrain(0)) {
    EXPECT_LE(n, 4u);
    posted += n;
  }
  EXPECT_EQ(posted, 10u);
}

TEST(WorkerDrainTest, PathFlagsAndRequestErrors) {
  TestCluster tc(2, Manual());
  Daemon& a = *tc.daemons[0];
  auto [out, in] = OpenConnections(tc, 0, 1, 1);
  auto mr = *a.RegisterAppMemory(a.RegisterApp(), 256 * 1024);
  RawConn& c = out[0];
  const uint64_t small = c.PushSend(mr.id, kSendHeadroom, 64);
  const uint64_t large = c.PushSend(mr.id, kSendHeadroom, 64 * 1024);
  const uint64_t ud = c.PushSend(mr.id, kSendHeadroom, 64, *Flags::Parse("UD|SEND"));
  const uint64_t too_big =
      c.PushSend(mr.id, kSendHeadroom, 8192, *Flags::Parse("RC|SEND"));
  const uint64_t no_room = c.PushSend(mr.id, 0, 64, *Flags::Parse("RC|SEND"));
  const uint64_t bad_region = c.PushSend(9999, kSendHeadroom, 64);
  std::map<uint64_t, ipc::ResponseRecord> got;
  for (int i = 0; i < 50 && got.size() < 6; ++i) {
    tc.Step();
    while (auto r = c.Pop()) got[r->seq] = *r;
    while (auto r = in[0].Pop()) {
      if (r->op == ipc::kInboundDataOp) in[0].PushAck(*r);
    }
  }
  ASSERT_EQ(got.size(), 6u);
  EXPECT_EQ(got[small].status, ErrorCode::kOk);
  EXPECT_EQ(Flags(got[small].flags),
            Flags::Of(verbs::TransportMode::kRC, verbs::Verb::kSend));
  EXPECT_EQ(got[large].status, ErrorCode::kOk);
  EXPECT_EQ(Flags(got[large].flags),
            Flags::Of(verbs::TransportMode::kRC, verbs::Verb::kWrite));
  EXPECT_EQ(got[ud].status, ErrorCode::kInvalidArgument);
  EXPECT_EQ(got[too_big].status, ErrorCode::kMsgTooLarge);
  EXPECT_EQ(got[no_room].status, ErrorCode::kInvalidArgument);
  EXPECT_EQ(got[bad_region].status, ErrorCode::kBadLkey);
  for (auto& [seq, r] : got) EXPECT_EQ(r.fd, c.ep.fd);
}

TEST(WorkerDrainTest, OutOfOrderSequenceIsRejected) {
  TestCluster tc(2, Manual());
  Daemon& a = *tc.daemons[0];
  auto [out, in] = OpenConnections(tc, 0, 1, 1);
  auto mr = *a.RegisterAppMemory(a.RegisterApp(), 4096);
  out[0].next_seq = 5;
  out[0].PushSend(mr.id, kSendHeadroom, 8);
  out[0].next_seq = 5;
  out[0].PushSend(mr.id, kSendHeadroom, 8);
  std::vector<ErrorCode> codes;
  for (int i = 0; i < 20 && codes.size() < 2; ++i) {
    tc.Step();
    while (auto r = out[0].Pop()) codes.push_back(r->status);
  }
  ASSERT_EQ(codes.size(), 2u);
  EXPECT_EQ(std::count(codes.begin(), codes.end(), ErrorCode::kOk), 1);
  EXPECT_EQ(std::count(codes.begin(), codes.end(), ErrorCode::kInvalidArgument),
            1);
}

TEST(PollerTest, InboundSendReachesTheMappedFd) {
  TestCluster tc(2, Manual());
  Daemon& a = *tc.daemons[0];
  auto [out, in] = OpenConnections(tc, 0, 1, 3);
  auto mr = *a.RegisterAppMemory(a.RegisterApp(), 4096);
  auto bytes = *tc.fabric.MrBytes(mr.id);
  std::memcpy(bytes.data() + kSendHeadroom, "hello", 5);
  out[1].PushSend(mr.id, kSendHeadroom, 5);
  for (int i = 0; i < 5; ++i) tc.Step();
  EXPECT_FALSE(in[0].Pop().has_value());
  EXPECT_FALSE(in[2].Pop().has_value());
  auto r = in[1].Pop();
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->op, ipc::kInboundDataOp);
  EXPECT_EQ(r->fd, in[1].ep.fd);
  ASSERT_EQ(r->length, 5u);
  auto landed = *tc.fabric.MrBytes(r->region);
  EXPECT_EQ(std::memcmp(landed.data() + r->offset, "hello", 5), 0);
  EXPECT_EQ(tc.daemons[1]->counters().inbound_msgs, 1u);
}

TEST(PollerTest, UnknownVqpnIsCountedAndDropped) {
  TestCluster tc(2, Manual());
  Daemon& a = *tc.daemons[0];
  Daemon& b = *tc.daemons[1];
  auto [out, in] = OpenConnections(tc, 0, 1, 2);
  const size_t free_before = b.free_srq_slots();
  auto mr = *a.RegisterAppMemory(a.RegisterApp(), 4096);
  verbs::WorkRequest wr;
  wr.wr_id = PackWrId(0xFFFFFFFEu, 1);
  wr.verb = verbs::Verb::kSend;
  wr.local = {mr.id, 0, 64};
  wr.imm_data = 0xFFFFFFF0u;  // never allocated
  ASSERT_TRUE(tc.fabric.PostSend(*a.SharedQpOf(out[0].ep.fd), wr).ok());
  for (int i = 0; i < 5; ++i) tc.Step();
  EXPECT_EQ(b.counters().unknown_vqpn, 1u);
  EXPECT_EQ(b.counters().inbound_msgs, 0u);
  for (auto& c : in) EXPECT_FALSE(c.Pop().has_value());
  for (auto& c : out) EXPECT_FALSE(c.Pop().has_value());
  // The stray receive slot went back to the pool.
  EXPECT_EQ(b.free_srq_slots(), free_before + 1);
  EXPECT_EQ(b.held_srq_slots(), 0u);
}

TEST(PollerTest, ReleasedFdGivesBackUnconsumedSlots) {
  TestCluster tc(2, Manual());
  Daemon& a = *tc.daemons[0];
  Daemon& b = *tc.daemons[1];
  auto [out, in] = OpenConnections(tc, 0, 1, 1);
  auto mr = *a.RegisterAppMemory(a.RegisterApp(), 4096);
  for (int i = 0; i < 3; ++i) out[0].PushSend(mr.id, kSendHeadroom, 10);
  for (int i = 0; i < 5; ++i) tc.Step();
  EXPECT_EQ(b.held_srq_slots(), 3u);

  ipc::RequestRecord close;
  close.op = ipc::RequestOp::kClose;
  close.fd = in[0].ep.fd;
  close.seq = in[0].next_seq++;
  ASSERT_TRUE(in[0].Push(close));
  bool closed = false;
  for (int i = 0; i < 10 && !closed; ++i) {
    tc.Step();
    while (auto r = in[0].Pop()) {
      if (r->seq == close.seq && r->op == uint8_t(ipc::RequestOp::kClose)) {
        closed = true;
      }
    }
  }
  ASSERT_TRUE(closed);
  // The app never consumed its messages; releasing the fd frees them.
  const AppId owner = 1;  // the only app registered on b
  EXPECT_EQ(b.ReleaseFd(owner + 1, in[0].ep.fd).code(), ErrorCode::kBadFd);
  ASSERT_TRUE(b.ReleaseFd(owner, in[0].ep.fd).ok());
  tc.Step();
  EXPECT_EQ(b.held_srq_slots(), 0u);
}

TEST(PollerTest, InterleavedCompletionsFromTenConnections) {
  auto r = testing::RunDemuxFuzz(100, 10, 7);
  ASSERT_TRUE(r.finished);
  EXPECT_EQ(r.shared_qps, 1u);
  EXPECT_EQ(r.delivered, 100u);
  EXPECT_EQ(r.responses, 100u);
  EXPECT_EQ(r.cross_deliveries, 0u);
  EXPECT_EQ(r.corrupt, 0u);
  EXPECT_EQ(r.out_of_order, 0u);
  EXPECT_EQ(r.bad_responses, 0u);
  EXPECT_EQ(r.missing_responses, 0u);
}

TEST(PollerTest, DemuxFuzzManyConnections) {
  auto r = testing::RunDemuxFuzz(20000, 100, 11);
  ASSERT_TRUE(r.finished);
  EXPECT_EQ(r.delivered, 20000u);
  EXPECT_EQ(r.cross_deliveries, 0u);
  EXPECT_EQ(r.corrupt, 0u);
  EXPECT_EQ(r.out_of_order, 0u);
  EXPECT_EQ(r.bad_responses, 0u);
  EXPECT_GT(r.send_path, 0u);
  EXPECT_GT(r.write_path, 0u);
}

TEST(PollerTest, SrqStaysFedUnderLoad) {
  DaemonConfig config = Manual();
  config.srq_depth = 16;
  config.srq_low_watermark = 4;
  TestCluster tc(2, config);
  Daemon& a = *tc.daemons[0];
  auto [out, in] = OpenConnections(tc, 0, 1, 1);
  auto mr = *a.RegisterAppMemory(a.RegisterApp(), 4096);
  uint64_t received = 0;
  for (int round = 0; round < 40; ++round) {
    for (int k = 0; k < 8; ++k) out[0].PushSend(mr.id, kSendHeadroom, 32);
    for (int i = 0; i < 4; ++i) {
      tc.Step();
      while (out[0].Pop()) {
      }
      while (auto r = in[0].Pop()) {
        if (r->op != ipc::kInboundDataOp) continue;
        ++received;
        in[0].PushAck(*r);
      }
    }
  }
  for (int i = 0; i < 20; ++i) {
    tc.Step();
    while (auto r = in[0].Pop()) {
      if (r->op == ipc::kInboundDataOp) {
        ++received;
        in[0].PushAck(*r);
      }
    }
  }
  EXPECT_EQ(received, 320u);
}

TEST(DaemonConcurrencyTest, ParkedWorkerDoesNotBlockOthers) {
  std::atomic<bool> park{false};
  std::atomic<bool> parked{false};
  DaemonConfig config;
  config.worker_count = 2;
  config.before_request = [&](size_t worker) {
    if (worker != 0 || !park.load()) return;
    parked = true;
    while (park.load()) std::this_thread::sleep_for(1ms);
    parked = false;
  };
  TestCluster tc(2, config);
  Daemon& a = *tc.daemons[0];
  auto [out, in] = OpenConnections(tc, 0, 1, 8);
  RawConn* on0 = nullptr;
  RawConn* on1 = nullptr;
  for (auto& c : out) {
    if (c.ep.vqpn % 2 == 0 && !on0) on0 = &c;
    if (c.ep.vqpn % 2 == 1 && !on1) on1 = &c;
  }
  ASSERT_TRUE(on0 && on1);
  ASSERT_NE(a.SharedQpOf(on0->ep.fd), a.SharedQpOf(on1->ep.fd));
  auto mr = *a.RegisterAppMemory(a.RegisterApp(), 4096);

  park = true;
  on0->PushSend(mr.id, kSendHeadroom, 16);
  const auto deadline = std::chrono::steady_clock::now() + 5s;
  while (!parked && std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(1ms);
  }
  ASSERT_TRUE(parked);

  int answered = 0;
  for (int i = 0; i < 100; ++i) {
    on1->PushSend(mr.id, kSendHeadroom, 16);
    auto r = WaitPop(*on1, 2000ms);
    if (r && r->status == ErrorCode::kOk) ++answered;
  }
  EXPECT_EQ(answered, 100);
  EXPECT_TRUE(parked);
  EXPECT_FALSE(on0->Pop().has_value());

  park = false;
  auto r = WaitPop(*on0, 2000ms);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->status, ErrorCode::kOk);
}

TEST(DaemonStopTest, EveryAcceptedRequestIsAnswered) {
  DaemonConfig config;
  config.worker_count = 2;
  TestCluster tc(2, config);
  Daemon& a = *tc.daemons[0];
  auto [out, in] = OpenConnections(tc, 0, 1, 6);
  auto mr = *a.RegisterAppMemory(a.RegisterApp(), 128 * 1024);
  std::vector<std::set<uint64_t>> pushed(out.size());
  for (int k = 0; k < 20; ++k) {
    for (size_t i = 0; i < out.size(); ++i) {
      const uint64_t len = (k % 5 == 0) ? 32 * 1024 : 100;
      if (uint64_t seq = out[i].PushSend(mr.id, kSendHeadroom, len)) {
        pushed[i].insert(seq);
      }
    }
  }
  a.Stop();
  const uint64_t accepted = a.counters().requests;
  uint64_t answered = 0;
  for (size_t i = 0; i < out.size(); ++i) {
    std::set<uint64_t> seen;
    while (auto r = out[i].Pop()) {
      EXPECT_EQ(r->fd, out[i].ep.fd);
      EXPECT_TRUE(pushed[i].count(r->seq));
      EXPECT_TRUE(seen.insert(r->seq).second) << "duplicate seq " << r->seq;
      ++answered;
    }
  }
  EXPECT_EQ(answered, accepted);
  EXPECT_EQ(a.qps_created(), 2u);
}

TEST(DaemonResourceTest, QpCountIndependentOfConnections) {
  DaemonConfig config = Manual(2);
  TestCluster tc(3, config);
  OpenConnections(tc, 0, 1, 40);
  OpenConnections(tc, 0, 2, 40);
  EXPECT_LE(tc.daemons[0]->qps_created(), 2u * 2u);
  EXPECT_LE(tc.daemons[1]->qps_created(), 2u);

  DaemonConfig literal = Manual(1);
  literal.qps_per_node = 1;
  TestCluster one(3, literal);
  OpenConnections(one, 0, 1, 40);
  OpenConnections(one, 0, 2, 40);
  EXPECT_EQ(one.daemons[0]->qps_created(), 2u);
}

TEST(DaemonMetricsTest, LineMatchesHeader) {
  TestCluster tc(2, Manual());
  Daemon& a = *tc.daemons[0];
  auto [out, in] = OpenConnections(tc, 0, 1, 2);
  auto mr = *a.RegisterAppMemory(a.RegisterApp(), 4096);
  for (int i = 0; i < 4; ++i) out[i % 2].PushSend(mr.id, kSendHeadroom, 100);
  for (int i = 0; i < 5; ++i) tc.Step();
  EXPECT_EQ(Daemon::MetricsHeader(),
            "ts,node,qps_active,cache_hit_rate,msgs,bytes,mean_ns,cpu_load,"
            "mem_units");
  const std::string line = a.MetricsLine(4096);
  std::vector<std::string> fields;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
  ASSERT_EQ(fields.size(), 9u) << line;
  EXPECT_EQ(fields[1], std::to_string(a.node()));
  EXPECT_EQ(fields[2], "1");
  EXPECT_EQ(fields[4], "4");
  EXPECT_EQ(fields[5], "400");
  const double cpu = std::stod(fields[7]);
  EXPECT_GE(cpu, 0.0);
  EXPECT_LE(cpu, 1.0);

  std::ostringstream sink;
  a.SetMetricsSink(&sink, 1, 4096);
  out[0].PushSend(mr.id, kSendHeadroom, 100);
  for (int i = 0; i < 5; ++i) tc.Step();
  EXPECT_NE(sink.str().find('\n'), std::string::npos);
}

TEST(DaemonLoadTest, BusyWorkerRaisesCpuLoad) {
  DaemonConfig config = Manual();
  config.worker_request_ns = 100000;
  TestCluster tc(2, config);
  Daemon& a = *tc.daemons[0];
  auto [out, in] = OpenConnections(tc, 0, 1, 1);
  auto mr = *a.RegisterAppMemory(a.RegisterApp(), 4096);
  EXPECT_EQ(a.load().cpu_load, 0.0);
  for (int round = 0; round < 50; ++round) {
    tc.fabric.AdvanceTo(tc.fabric.now_ns() + 1'000'000);
    for (int k = 0; k < 8; ++k) out[0].PushSend(mr.id, kSendHeadroom, 8);
    for (int i = 0; i < 3; ++i) {
      tc.Step();
      while (out[0].Pop()) {
      }
      while (auto r = in[0].Pop()) {
        if (r->op == ipc::kInboundDataOp) in[0].PushAck(*r);
      }
    }
  }
  EXPECT_GT(a.load().cpu_load, 0.0);
  EXPECT_LE(a.load().cpu_load, 1.0);
  EXPECT_GT(a.load().mem_used, 0u);
}

}  // namespace
}  // namespace raas
