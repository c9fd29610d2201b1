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

#ifndef RAAS_SRC_DAEMON_DAEMON_STATE_H_
#define RAAS_SRC_DAEMON_DAEMON_STATE_H_

// Private state shared by the daemon's control-plane and data-path files.

#include <atomic>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "raas/daemon/daemon.h"

namespace raas {

// Per-connection control block: one 16-byte header slot per message kind,
// each reused only after the previous message of that kind was consumed.
inline constexpr uint64_t kControlBytes = 64;
inline constexpr uint64_t kNotifySlot = 0;
inline constexpr uint64_t kCreditSlot = 16;
inline constexpr uint64_t kFinSlot = 32;

struct Daemon::LoadCell {
  explicit LoadCell(size_t workers) : per_worker(workers) {}
  std::vector<std::atomic<double>> per_worker;
  double Mean() const {
    double sum = 0;
    for (const auto& v : per_worker) sum += v.load(std::memory_order_relaxed);
    return per_worker.empty() ? 0.0 : sum / static_cast<double>(per_worker.size());
  }
};

struct VqpnLease {
  VqpnLease(VqpnAllocator& alloc, uint32_t vqpn) : alloc(alloc), vqpn(vqpn) {}
  ~VqpnLease() { alloc.Release(vqpn); }
  VqpnAllocator& alloc;
  uint32_t vqpn;
};

struct Daemon::Connection {
  uint32_t fd = 0;
  uint32_t vqpn = 0;
  AppId app = 0;
  Addr dest;
  verbs::NodeId peer_node = 0;
  Flags default_flags;
  uint32_t shard = 0;
  size_t worker = 0;
  verbs::QpId qp = 0;
  std::unique_ptr<WireRing> requests;
  std::unique_ptr<WireRing> responses;
  std::unique_ptr<ipc::SpscRing<Inflight>> inflight;
  ipc::EventChannel events;
  verbs::MemoryRegion window;
  verbs::MemoryRegion control;
  std::span<std::byte> control_bytes;

  // Fixed once connected.
  uint32_t peer_window_rkey = 0;
  uint64_t peer_window_len = 0;
  uint64_t peer_slot_payload = 0;
  std::shared_ptr<LoadCell> peer_load;
  std::weak_ptr<Connection> peer;
  std::shared_ptr<ipc::EventChannel> peer_bell;  // wakes the peer's poller
  std::shared_ptr<VqpnLease> lease;  // guarded by the control mutex

  std::atomic<bool> open{true};
  std::atomic<bool> peer_gone{false};
  std::atomic<bool> released{false};

  // Owned by the worker.
  uint64_t last_seq = 0;
  bool window_credit = true;
  bool owe_credit = false;
  bool closing = false;
  std::deque<ipc::RequestRecord> deferred;

  // Owned by the poller.
  uint64_t inbound_seq = 0;
  std::deque<ipc::ResponseRecord> overflow;
  bool in_overflow_list = false;
  std::optional<std::pair<uint32_t, ErrorCode>> failed_write;
};

struct Daemon::Listener {
  AppId app = 0;
  Addr addr;
  std::deque<std::shared_ptr<Connection>> pending;
  bool closed = false;
};

struct Daemon::Batch {
  struct WrMeta {
    Connection* conn = nullptr;
    std::optional<ipc::RequestRecord> request;  // answered if the post fails
    bool write_part = false;
    bool credit = false;
  };
  std::vector<verbs::WorkRequest> wrs;
  std::vector<WrMeta> meta;
  size_t room = 0;
  bool active = false;
};

struct Daemon::Worker {
  size_t index = 0;
  ipc::EventChannel doorbell;
  PublishedList<Connection> conns;
  std::unique_ptr<ipc::SpscRing<Note>> notes;
  std::unique_ptr<ipc::SpscRing<Connection*>> credits;
  std::deque<Note> pending_notes;           // worker-owned
  std::deque<Connection*> pending_credits;  // poller-owned
  LoadTracker load;
  size_t rr = 0;
  std::map<verbs::QpId, Batch> batches;
  size_t posted_this_drain = 0;
  size_t handled_this_drain = 0;
  // Set while stopping once progress stalls: requests that would wait for
  // credit are answered with kShutdown instead.
  bool abandoning = false;
  std::atomic<bool> exited{false};

  std::atomic<uint64_t> requests{0};
  std::atomic<uint64_t> posted_wrs{0};
  std::atomic<uint64_t> batch_count{0};
  std::atomic<uint64_t> rejected{0};
  std::atomic<uint64_t> answered_here{0};
  std::atomic<uint64_t> deferred_count{0};
};

}  // namespace raas

#endif  // RAAS_SRC_DAEMON_DAEMON_STATE_H_
