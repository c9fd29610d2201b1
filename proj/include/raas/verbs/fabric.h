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

#ifndef RAAS_VERBS_FABRIC_H_
#define RAAS_VERBS_FABRIC_H_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "raas/common/config.h"
#include "raas/common/status.h"
#include "raas/verbs/nic_model.h"
#include "raas/verbs/types.h"

namespace raas::verbs {

struct FabricConfig {
  NicCostConfig nic;
  uint64_t reg_fixed_ns = 800;
  double reg_per_byte_ns = 0.1;
  uint64_t propagation_ns = 1500;
  // How long an RC sender retries before reporting receiver-not-ready.
  uint64_t rnr_window_ns = 10000;
  uint64_t arena_bytes = uint64_t{256} << 20;
  uint32_t max_send_wr = 4096;
  uint32_t max_recv_wr = 4096;

  // Reads the keys it knows from `config`; call RejectUnknown() afterwards
  // if the file holds nothing else.
  static Result<FabricConfig> FromConfig(KeyValueConfig& config);
  Status Validate() const;
};

struct BatchResult {
  size_t accepted = 0;
  Status error;            // ok() when the whole batch was accepted
  size_t error_index = 0;  // index of the first rejected WR
};

struct NodeResources {
  size_t qps = 0;
  size_t cqs = 0;
  size_t srqs = 0;
  size_t mrs = 0;
  uint64_t registered_bytes = 0;
};

struct NodeTraffic {
  uint64_t work_requests = 0;
  uint64_t bytes = 0;
  uint64_t service_ns = 0;  // total NIC occupancy
};

// In-process lossless RDMA fabric. Posting only queues work; Progress()
// (also run by PollCq) lets every node's NIC drain its send queues in
// virtual time. Each NIC serves one work request at a time and arbitrates
// round-robin across queue pairs with pending work, in ascending qp id.
//
// All methods are safe to call from any thread.
class Fabric {
 public:
  explicit Fabric(FabricConfig config = {});
  ~Fabric();

  Fabric(const Fabric&) = delete;
  Fabric& operator=(const Fabric&) = delete;

  NodeId AddNode();
  size_t node_count() const;
  bool HasNode(NodeId node) const;

  Result<CqId> CreateCq(NodeId node);
  Result<SrqId> CreateSrq(NodeId node, uint32_t max_wr);
  Result<QpId> CreateQp(NodeId node, TransportMode mode, CqId cq,
                        std::optional<SrqId> srq = std::nullopt);
  Status ConnectQp(QpId qp, QpId peer);
  Status DestroyQp(QpId qp);
  Result<QpInfo> GetQp(QpId qp) const;

  Result<MemoryRegion> RegisterMr(NodeId node, uint64_t length);
  Status DeregisterMr(MrId mr);
  Result<MemoryRegion> GetMr(MrId mr) const;
  // The region's bytes. The span stays valid until the region is
  // deregistered; callers must not touch it while a WR using it is in
  // flight.
  Result<std::span<std::byte>> MrBytes(MrId mr);
  uint64_t RegistrationCost(uint64_t length) const;

  Status PostSend(QpId qp, const WorkRequest& wr);
  // Accepts the longest valid prefix. Two or more accepted WRs form one
  // doorbell batch and pay the discounted fixed cost.
  BatchResult PostBatch(QpId qp, std::span<const WorkRequest> wrs);
  Status PostRecv(QpId qp, const WorkRequest& wr);
  Status PostSrqRecv(SrqId srq, const WorkRequest& wr);

  // Runs pending work, then pops up to `max_entries` completions ordered by
  // (timestamp, qp id, arrival).
  std::vector<CompletionEntry> PollCq(CqId cq, size_t max_entries);

  // Executes every queued work request. Returns how many ran.
  size_t Progress();

  // Direct access to the QP context cache of `qp`'s node.
  Result<NicServiceResult> NicService(QpId qp);

  uint64_t now_ns() const;
  void AdvanceTo(uint64_t ts_ns);

  size_t SrqDepth(SrqId srq) const;
  size_t RecvDepth(QpId qp) const;
  size_t SendQueueDepth(QpId qp) const;
  size_t PendingWorkRequests() const;

  NicCounters nic_counters(NodeId node) const;
  bool IsContextCached(QpId qp) const;
  void ResetCounters();
  NodeResources resources(NodeId node) const;
  NodeTraffic traffic(NodeId node) const;

  // Per-WR trace lines `ts,node,qp,verb,bytes,cache_hit`. Pass nullptr to
  // stop tracing.
  void SetTrace(std::ostream* out);

  const FabricConfig& config() const { return config_; }

 private:
  struct PendingWr {
    WorkRequest wr;
    bool batched = false;
    uint64_t post_ns = 0;
  };

  struct Qp {
    QpInfo info;
    std::deque<PendingWr> send_queue;
    std::deque<WorkRequest> recv_queue;
    // Send-side completions of one QP surface in posting order.
    uint64_t last_send_cqe_ns = 0;
  };

  struct Srq {
    NodeId node = 0;
    uint32_t max_wr = 0;
    std::deque<WorkRequest> recv_queue;
  };

  struct CqEntryKey {
    uint64_t ts;
    QpId qp;
    uint64_t seq;
    bool operator>(const CqEntryKey& o) const {
      if (ts != o.ts) return ts > o.ts;
      if (qp != o.qp) return qp > o.qp;
      return seq > o.seq;
    }
  };
  struct QueuedCompletion {
    CqEntryKey key;
    CompletionEntry entry;
    bool operator>(const QueuedCompletion& o) const { return key > o.key; }
  };

  struct Cq {
    NodeId node = 0;
    std::priority_queue<QueuedCompletion, std::vector<QueuedCompletion>,
                        std::greater<>>
        entries;
  };

  class Arena {
   public:
    explicit Arena(uint64_t bytes);
    std::optional<uint64_t> Allocate(uint64_t length);
    void Free(uint64_t base, uint64_t length);
    std::byte* data() { return storage_.get(); }

   private:
    std::unique_ptr<std::byte[]> storage_;
    std::map<uint64_t, uint64_t> free_;  // offset -> length
  };

  struct Node {
    Node(const FabricConfig& config);
    NicModel nic;
    Arena arena;
    uint64_t nic_busy_until = 0;
    std::set<QpId> pending_qps;
    QpId rr_cursor = 0;
    NodeTraffic traffic;
    size_t cqs = 0;
    size_t srqs = 0;
    size_t mrs = 0;
    uint64_t registered_bytes = 0;
  };

  Status ValidateSendLocked(const Qp& qp, const WorkRequest& wr,
                            size_t already_queued) const;
  Status ValidateLocalLocked(NodeId node, const LocalSlice& slice) const;
  const MemoryRegion* FindByRkeyLocked(NodeId node, uint32_t rkey) const;
  std::byte* AddressLocked(const MemoryRegion& mr, uint64_t offset);
  bool ExecuteOneLocked();
  void ExecuteLocked(Node& node, NodeId node_id, Qp& qp, PendingWr& pending);
  void CompleteLocked(CqId cq, CompletionEntry entry);
  uint32_t FreshKeyLocked();
  size_t ProgressLocked();

  const FabricConfig config_;
  mutable std::mutex mu_;
  std::vector<std::unique_ptr<Node>> nodes_;
  std::unordered_map<QpId, Qp> qps_;
  std::unordered_map<CqId, Cq> cqs_;
  std::unordered_map<SrqId, Srq> srqs_;
  std::unordered_map<MrId, MemoryRegion> mrs_;
  std::unordered_map<uint32_t, MrId> rkey_index_;
  std::set<uint32_t> used_keys_;
  uint64_t key_state_ = 0x5eed;
  QpId next_qp_ = 1;
  CqId next_cq_ = 1;
  SrqId next_srq_ = 1;
  MrId next_mr_ = 1;
  uint64_t completion_seq_ = 0;
  uint64_t now_ns_ = 0;
  size_t pending_ = 0;
  std::ostream* trace_ = nullptr;
};

}  // namespace raas::verbs

#endif  // RAAS_VERBS_FABRIC_H_
