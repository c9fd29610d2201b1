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

#ifndef RAAS_DAEMON_DAEMON_H_
#define RAAS_DAEMON_DAEMON_H_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "raas/common/config.h"
#include "raas/common/status.h"
#include "raas/daemon/addr.h"
#include "raas/daemon/flags.h"
#include "raas/daemon/load_tracker.h"
#include "raas/daemon/policy.h"
#include "raas/daemon/slot_table.h"
#include "raas/daemon/vqpn.h"
#include "raas/ipc/event_channel.h"
#include "raas/ipc/records.h"
#include "raas/ipc/spsc_ring.h"
#include "raas/verbs/fabric.h"

namespace raas {

class Daemon;
struct VqpnLease;

struct DaemonConfig {
  uint32_t worker_count = 1;
  // Shared RC QPs per destination node; 0 means one per worker.
  uint32_t qps_per_node = 0;
  uint32_t srq_depth = 256;
  uint32_t srq_low_watermark = 64;
  // Receive slots backing the SRQ, as a multiple of srq_depth.
  uint32_t srq_pool_factor = 4;
  // Per-connection landing area for inbound WRITEs and source for peer READs.
  uint64_t window_bytes = uint64_t{1} << 20;
  uint32_t ring_capacity = 256;
  // Simulated CPU time a worker spends per request; feeds cpu_load.
  uint64_t worker_request_ns = 300;
  bool threaded = true;
  PolicyConfig policy;
  // Optional NIC/fabric constants file, loaded by whoever builds the fabric.
  std::string nic_model_path;
  // Called by a worker before it handles each request, with its index.
  std::function<void(size_t)> before_request;

  static Result<DaemonConfig> FromConfig(KeyValueConfig& config);
  Status Validate() const;
  uint32_t shards() const {
    return qps_per_node == 0 ? worker_count : qps_per_node;
  }
};

// Address book and shared control plane for every daemon on one fabric.
class Cluster {
 public:
  explicit Cluster(verbs::Fabric& fabric, uint64_t vqpn_limit = UINT32_MAX);

  // Adds a fabric node reachable at `addr`.
  Result<verbs::NodeId> AddHost(const Addr& addr);
  // Makes `addr` another name for an existing node.
  Status AddAlias(const Addr& addr, verbs::NodeId node);
  Result<verbs::NodeId> Resolve(const Addr& addr) const;

  verbs::Fabric& fabric() { return fabric_; }
  VqpnAllocator& vqpns() { return vqpns_; }

 private:
  friend class Daemon;

  verbs::Fabric& fabric_;
  VqpnAllocator vqpns_;
  mutable std::mutex mu_;  // control plane: names, daemons, listeners
  std::condition_variable_any accept_cv_;
  std::map<std::string, verbs::NodeId> names_;
  std::map<verbs::NodeId, Addr> primary_;
  std::unordered_map<verbs::NodeId, Daemon*> daemons_;
};

using AppId = uint32_t;
using WireRing = ipc::SpscRing<ipc::WireRecord>;

// What an application needs to drive one connection.
struct FdEndpoint {
  uint32_t fd = 0;
  uint32_t vqpn = 0;
  Addr dest;
  Flags default_flags;
  WireRing* requests = nullptr;   // app produces
  WireRing* responses = nullptr;  // daemon produces
  ipc::EventChannel* events = nullptr;    // daemon -> app
  ipc::EventChannel* doorbell = nullptr;  // app -> owning worker
  const std::atomic<bool>* peer_gone = nullptr;
  uint64_t max_send_payload = 0;  // largest SEND the peer can receive
  uint64_t window_bytes = 0;      // largest WRITE or READ
};

// Bytes of headroom a SEND request must leave before its offset; the
// daemon writes its message header there.
inline constexpr uint64_t kSendHeadroom = 16;

struct DaemonCounters {
  uint64_t requests = 0;
  uint64_t responses = 0;
  uint64_t completed_msgs = 0;
  uint64_t completed_bytes = 0;
  uint64_t inbound_msgs = 0;
  uint64_t posted_wrs = 0;
  uint64_t batches = 0;
  uint64_t unknown_vqpn = 0;
  uint64_t rejected_posts = 0;
};

class Daemon {
 public:
  static Result<std::unique_ptr<Daemon>> Start(Cluster& cluster,
                                               verbs::NodeId node,
                                               DaemonConfig config);
  ~Daemon();
  Daemon(const Daemon&) = delete;
  Daemon& operator=(const Daemon&) = delete;

  // Finishes every accepted request, closes all connections and releases
  // the daemon's queue pairs and memory. Idempotent.
  void Stop();

  // Control plane.
  AppId RegisterApp();
  Result<verbs::MemoryRegion> RegisterAppMemory(AppId app, uint64_t length);
  Status DeregisterAppMemory(AppId app, verbs::MrId mr);
  bool OwnsMemory(AppId app, verbs::MrId mr) const;
  Result<uint32_t> Listen(AppId app, const Addr& addr);
  Result<FdEndpoint> Accept(AppId app, uint32_t listen_fd,
                            std::optional<std::chrono::milliseconds> timeout);
  Status CloseListener(AppId app, uint32_t listen_fd);
  Result<FdEndpoint> Connect(AppId app, const Addr& dest, Flags flags);
  // Drops a connection whose CLOSE has been answered. Its vqpn returns to
  // the pool once both ends are released.
  Status ReleaseFd(AppId app, uint32_t fd);

  // Data path. In manual mode (threaded = false) the caller drives these;
  // each worker index must be driven by one thread at a time, and
  // PollerPoll by a single thread.
  size_t WorkerDrain(size_t worker);
  size_t PollerPoll();
  // True when no request, internal message or signaled WR is outstanding.
  bool Quiescent() const;

  // Metrics line `ts,node,qps_active,cache_hit_rate,msgs,bytes,mean_ns,
  // cpu_load,mem_units`; one mem unit is `mem_unit_bytes` registered bytes.
  std::string MetricsLine(uint64_t mem_unit_bytes) const;
  static std::string MetricsHeader();
  // Poller emits a metrics line every `interval_ns` of simulated time.
  void SetMetricsSink(std::ostream* out, uint64_t interval_ns,
                      uint64_t mem_unit_bytes);

  DaemonCounters counters() const;
  LoadStats load() const;
  size_t qps_created() const;
  size_t worker_count() const { return workers_.size(); }
  size_t live_threads() const;
  size_t free_srq_slots() const;
  // Receive slots holding data an application has not consumed yet.
  size_t held_srq_slots() const { return held_slot_count_.load(); }
  verbs::NodeId node() const { return node_; }
  const DaemonConfig& config() const { return config_; }
  std::optional<verbs::QpId> SharedQpOf(uint32_t fd) const;
  std::optional<uint32_t> VqpnOfFd(uint32_t fd) const;
  verbs::Fabric& fabric() { return fabric_; }
  Cluster& cluster() { return cluster_; }

 private:
  struct Connection;
  struct Worker;
  struct Listener;
  struct LoadCell;

  // Sequence numbers on the wire skip this value; it tags internal WRs.
  static constexpr uint32_t kInternalSeq = 0xFFFFFFFFu;

  enum class MsgType : uint32_t { kData = 1, kNotify = 2, kCredit = 3, kFin = 4 };

  struct Inflight {
    uint64_t seq = 0;
    uint32_t wire_seq = 0;
    uint64_t length = 0;
    uint32_t flags = 0;
    uint8_t op = 0;
  };

  // Worker -> poller.
  struct Note {
    enum class Kind : uint8_t { kRespond, kReleaseSlot };
    Kind kind = Kind::kRespond;
    Connection* conn = nullptr;
    ipc::ResponseRecord response;
    uint32_t slot = 0;
  };

  Daemon(Cluster& cluster, verbs::NodeId node, DaemonConfig config);
  Status Init();
  void WorkerLoop(size_t index);
  void PollerLoop();

  static uint32_t WireSeq(uint64_t seq);

  // Worker side.
  struct Batch;
  Batch& BatchFor(Worker& w, verbs::QpId qp);
  void HandleRequest(Worker& w, Connection& c, const ipc::RequestRecord& req);
  // Returns false when the request must wait for window credit.
  bool Execute(Worker& w, Connection& c, const ipc::RequestRecord& req);
  void AddToBatch(Worker& w, Connection& c, const verbs::WorkRequest& wr,
                  const ipc::RequestRecord* request, bool write_part,
                  bool credit);
  void PostCredit(Worker& w, Connection& c);
  void FlushBatches(Worker& w);
  void RespondFromWorker(Worker& w, Connection& c, ipc::ResponseRecord rec);
  void AbandonDeferred(Worker& w, Connection& c);
  void FlushNotes(Worker& w);

  // Poller side.
  void HandleCompletion(const verbs::CompletionEntry& cqe);
  void HandleSendCompletion(const verbs::CompletionEntry& cqe);
  void HandleRecvCompletion(const verbs::CompletionEntry& cqe);
  void Deliver(Connection& c, const ipc::ResponseRecord& rec);
  void RetryOverflow();
  void ReleaseSlot(uint32_t slot);
  void RefillSrq();
  void ReclaimReleased();
  void MaybeEmitMetrics();

  // Control plane helpers; cluster_.mu_ held.
  Result<verbs::QpId> SharedQpLocked(verbs::NodeId peer_node, uint32_t shard,
                                     Daemon& peer);
  Result<std::shared_ptr<Connection>> NewConnectionLocked(
      AppId app, uint32_t vqpn, uint32_t shard, verbs::QpId qp,
      const Addr& dest, verbs::NodeId peer_node, Flags flags);
  FdEndpoint EndpointOf(Connection& c);
  void PublishLocked(const std::shared_ptr<Connection>& c);

  Cluster& cluster_;
  verbs::Fabric& fabric_;
  const verbs::NodeId node_;
  const DaemonConfig config_;

  verbs::CqId cq_ = 0;
  verbs::SrqId srq_ = 0;
  verbs::MemoryRegion pool_mr_;
  std::span<std::byte> pool_bytes_;
  uint64_t slot_bytes_ = 0;
  std::vector<uint32_t> free_slots_;   // poller-owned
  std::vector<uint32_t> slot_holder_;  // vqpn an app holds each slot for
  std::atomic<size_t> free_slot_count_{0};
  std::atomic<size_t> held_slot_count_{0};

  std::vector<std::unique_ptr<Worker>> workers_;
  std::shared_ptr<LoadCell> load_;

  // Control-plane state, guarded by cluster_.mu_.
  AppId next_app_ = 1;
  uint32_t next_fd_ = 3;
  std::map<std::pair<verbs::NodeId, uint32_t>, verbs::QpId> shared_qps_;
  std::map<uint32_t, std::shared_ptr<Connection>> fds_;
  std::map<uint32_t, std::unique_ptr<Listener>> listeners_;
  std::map<std::string, uint32_t> listen_addrs_;
  std::map<verbs::MrId, AppId> app_mrs_;
  std::vector<std::shared_ptr<Connection>> all_connections_;

  SlotTable<Connection> demux_;
  std::vector<Connection*> overflow_;  // poller-owned
  // Released connections whose receive slots the poller must reclaim. The
  // lease keeps the vqpn from being reused until that has happened.
  std::mutex reclaim_mu_;
  std::vector<std::shared_ptr<VqpnLease>> reclaim_;
  std::atomic<bool> reclaim_pending_{false};

  std::shared_ptr<ipc::EventChannel> poller_bell_;
  std::vector<std::thread> threads_;
  std::atomic<bool> stopping_{false};
  std::atomic<size_t> live_threads_{0};
  std::atomic<bool> stopped_{false};

  std::ostream* metrics_out_ = nullptr;
  uint64_t metrics_interval_ns_ = 0;
  uint64_t metrics_next_ns_ = 0;
  uint64_t metrics_unit_bytes_ = 1;

  std::atomic<uint64_t> unknown_vqpn_{0};
  std::atomic<uint64_t> responses_{0};
  std::atomic<uint64_t> completed_msgs_{0};
  std::atomic<uint64_t> completed_bytes_{0};
  std::atomic<uint64_t> inbound_msgs_{0};
};

}  // namespace raas

#endif  // RAAS_DAEMON_DAEMON_H_
