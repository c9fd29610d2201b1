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

#include "raas/verbs/fabric.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace raas::verbs {
namespace {

constexpr uint64_t kArenaAlignment = 64;

uint64_t AlignUp(uint64_t v) {
  return (v + kArenaAlignment - 1) & ~(kArenaAlignment - 1);
}

uint64_t SplitMix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool SliceFits(uint64_t offset, uint64_t length, uint64_t region_length) {
  return offset <= region_length && length <= region_length - offset;
}

}  // namespace

Result<FabricConfig> FabricConfig::FromConfig(KeyValueConfig& kv) {
  FabricConfig c;
  uint64_t capacity = c.nic.cache_capacity;
  uint64_t mtu = c.nic.mtu;
  uint64_t max_send = c.max_send_wr;
  uint64_t max_recv = c.max_recv_wr;
  RAAS_RETURN_IF_ERROR(kv.TakeUint("cache_capacity", capacity));
  RAAS_RETURN_IF_ERROR(kv.TakeUint("hit_cost_ns", c.nic.hit_cost_ns));
  RAAS_RETURN_IF_ERROR(kv.TakeUint("miss_cost_ns", c.nic.miss_cost_ns));
  RAAS_RETURN_IF_ERROR(kv.TakeDouble("per_byte_ns", c.nic.per_byte_ns));
  RAAS_RETURN_IF_ERROR(kv.TakeDouble("batch_discount", c.nic.batch_discount));
  RAAS_RETURN_IF_ERROR(kv.TakeUint("mtu", mtu));
  RAAS_RETURN_IF_ERROR(kv.TakeUint("reg_fixed_ns", c.reg_fixed_ns));
  RAAS_RETURN_IF_ERROR(kv.TakeDouble("reg_per_byte_ns", c.reg_per_byte_ns));
  RAAS_RETURN_IF_ERROR(kv.TakeUint("propagation_ns", c.propagation_ns));
  RAAS_RETURN_IF_ERROR(kv.TakeUint("rnr_window_ns", c.rnr_window_ns));
  RAAS_RETURN_IF_ERROR(kv.TakeUint("arena_bytes", c.arena_bytes));
  RAAS_RETURN_IF_ERROR(kv.TakeUint("max_send_wr", max_send));
  RAAS_RETURN_IF_ERROR(kv.TakeUint("max_recv_wr", max_recv));
  constexpr uint64_t kU32Max = std::numeric_limits<uint32_t>::max();
  if (capacity > kU32Max || mtu > kU32Max || max_send > kU32Max ||
      max_recv > kU32Max) {
    return Status(ErrorCode::kBadConfig, "value out of 32-bit range");
  }
  c.nic.cache_capacity = static_cast<uint32_t>(capacity);
  c.nic.mtu = static_cast<uint32_t>(mtu);
  c.max_send_wr = static_cast<uint32_t>(max_send);
  c.max_recv_wr = static_cast<uint32_t>(max_recv);
  RAAS_RETURN_IF_ERROR(c.Validate());
  return c;
}

Status FabricConfig::Validate() const {
  if (nic.miss_cost_ns <= nic.hit_cost_ns) {
    return Status(ErrorCode::kBadConfig, "miss_cost_ns must exceed hit_cost_ns");
  }
  if (!(nic.batch_discount > 0.0 && nic.batch_discount <= 1.0)) {
    return Status(ErrorCode::kBadConfig, "batch_discount must be in (0,1]");
  }
  if (nic.per_byte_ns < 0.0 || reg_per_byte_ns < 0.0) {
    return Status(ErrorCode::kBadConfig, "per-byte costs must be >= 0");
  }
  if (nic.mtu == 0) return Status(ErrorCode::kBadConfig, "mtu must be > 0");
  if (arena_bytes == 0 || max_send_wr == 0 || max_recv_wr == 0) {
    return Status(ErrorCode::kBadConfig, "sizes must be > 0");
  }
  return Status::Ok();
}

Fabric::Arena::Arena(uint64_t bytes)
    : storage_(new std::byte[bytes]) {  // left uninitialized on purpose
  free_[0] = bytes;
}

std::optional<uint64_t> Fabric::Arena::Allocate(uint64_t length) {
  const uint64_t need = AlignUp(length);
  for (auto it = free_.begin(); it != free_.end(); ++it) {
    if (it->second < need) continue;
    const uint64_t base = it->first;
    const uint64_t remaining = it->second - need;
    free_.erase(it);
    if (remaining > 0) free_[base + need] = remaining;
    return base;
  }
  return std::nullopt;
}

void Fabric::Arena::Free(uint64_t base, uint64_t length) {
  uint64_t size = AlignUp(length);
  auto next = free_.lower_bound(base);
  if (next != free_.end() && base + size == next->first) {
    size += next->second;
    next = free_.erase(next);
  }
  if (next != free_.begin()) {
    auto prev = std::prev(next);
    if (prev->first + prev->second == base) {
      prev->second += size;
      return;
    }
  }
  free_[base] = size;
}

Fabric::Node::Node(const FabricConfig& config)
    : nic(config.nic), arena(config.arena_bytes) {}

Fabric::Fabric(FabricConfig config) : config_(config) {}

Fabric::~Fabric() = default;

NodeId Fabric::AddNode() {
  std::lock_guard lock(mu_);
  nodes_.push_back(std::make_unique<Node>(config_));
  return static_cast<NodeId>(nodes_.size() - 1);
}

size_t Fabric::node_count() const {
  std::lock_guard lock(mu_);
  return nodes_.size();
}

bool Fabric::HasNode(NodeId node) const {
  std::lock_guard lock(mu_);
  return node < nodes_.size();
}

Result<CqId> Fabric::CreateCq(NodeId node) {
  std::lock_guard lock(mu_);
  if (node >= nodes_.size()) return Status(ErrorCode::kNodeUnknown);
  const CqId id = next_cq_++;
  cqs_[id].node = node;
  ++nodes_[node]->cqs;
  return id;
}

Result<SrqId> Fabric::CreateSrq(NodeId node, uint32_t max_wr) {
  std::lock_guard lock(mu_);
  if (node >= nodes_.size()) return Status(ErrorCode::kNodeUnknown);
  if (max_wr == 0) return Status(ErrorCode::kInvalidArgument, "max_wr == 0");
  const SrqId id = next_srq_++;
  Srq& srq = srqs_[id];
  srq.node = node;
  srq.max_wr = max_wr;
  ++nodes_[node]->srqs;
  return id;
}

Result<QpId> Fabric::CreateQp(NodeId node, TransportMode mode, CqId cq,
                              std::optional<SrqId> srq) {
  std::lock_guard lock(mu_);
  if (node >= nodes_.size()) return Status(ErrorCode::kNodeUnknown);
  if (srq.has_value() && mode != TransportMode::kRC) {
    return Status(ErrorCode::kSrqUnsupported,
                  "shared receive queues attach to RC queue pairs only");
  }
  auto cq_it = cqs_.find(cq);
  if (cq_it == cqs_.end() || cq_it->second.node != node) {
    return Status(ErrorCode::kUnknownObject, "cq not on this node");
  }
  if (srq.has_value()) {
    auto srq_it = srqs_.find(*srq);
    if (srq_it == srqs_.end() || srq_it->second.node != node) {
      return Status(ErrorCode::kUnknownObject, "srq not on this node");
    }
  }
  const QpId id = next_qp_++;
  Qp& qp = qps_[id];
  qp.info.id = id;
  qp.info.node = node;
  qp.info.mode = mode;
  qp.info.state = QpState::kReset;
  qp.info.cq = cq;
  qp.info.srq = srq;
  return id;
}

Status Fabric::ConnectQp(QpId a, QpId b) {
  std::lock_guard lock(mu_);
  auto ita = qps_.find(a);
  auto itb = qps_.find(b);
  if (ita == qps_.end() || itb == qps_.end()) {
    return Status(ErrorCode::kUnknownObject, "no such qp");
  }
  if (a == b) return Status(ErrorCode::kSelfConnect);
  QpInfo& qa = ita->second.info;
  QpInfo& qb = itb->second.info;
  if (qa.mode == TransportMode::kUD || qb.mode == TransportMode::kUD) {
    return Status(ErrorCode::kUdNotConnectable);
  }
  if (qa.mode != qb.mode) return Status(ErrorCode::kModeMismatch);
  if (qa.state != QpState::kReset || qb.state != QpState::kReset) {
    return Status(ErrorCode::kAlreadyConnected);
  }
  qa.peer = b;
  qb.peer = a;
  qa.state = QpState::kReady;
  qb.state = QpState::kReady;
  return Status::Ok();
}

Status Fabric::DestroyQp(QpId id) {
  std::lock_guard lock(mu_);
  auto it = qps_.find(id);
  if (it == qps_.end()) return Status(ErrorCode::kUnknownObject);
  Node& node = *nodes_[it->second.info.node];
  pending_ -= it->second.send_queue.size();
  node.pending_qps.erase(id);
  node.nic.Forget(id);
  if (it->second.info.peer.has_value()) {
    auto peer = qps_.find(*it->second.info.peer);
    if (peer != qps_.end()) peer->second.info.peer.reset();
  }
  qps_.erase(it);
  return Status::Ok();
}

Result<QpInfo> Fabric::GetQp(QpId id) const {
  std::lock_guard lock(mu_);
  auto it = qps_.find(id);
  if (it == qps_.end()) return Status(ErrorCode::kUnknownObject);
  return it->second.info;
}

uint32_t Fabric::FreshKeyLocked() {
  for (;;) {
    const auto key = static_cast<uint32_t>(SplitMix64(key_state_));
    if (key != 0 && used_keys_.insert(key).second) return key;
  }
}

uint64_t Fabric::RegistrationCost(uint64_t length) const {
  return config_.reg_fixed_ns +
         static_cast<uint64_t>(std::llround(config_.reg_per_byte_ns *
                                            static_cast<double>(length)));
}

Result<MemoryRegion> Fabric::RegisterMr(NodeId node, uint64_t length) {
  std::lock_guard lock(mu_);
  if (node >= nodes_.size()) return Status(ErrorCode::kNodeUnknown);
  if (length == 0) {
    return Status(ErrorCode::kInvalidArgument, "zero-length region");
  }
  Node& n = *nodes_[node];
  const std::optional<uint64_t> base = n.arena.Allocate(length);
  if (!base.has_value()) return Status(ErrorCode::kArenaFull);
  now_ns_ += RegistrationCost(length);
  MemoryRegion mr;
  mr.id = next_mr_++;
  mr.node = node;
  mr.base = *base;
  mr.length = length;
  mr.local_key = FreshKeyLocked();
  mr.remote_key = FreshKeyLocked();
  mr.registered_at_ns = now_ns_;
  mrs_[mr.id] = mr;
  rkey_index_[mr.remote_key] = mr.id;
  ++n.mrs;
  n.registered_bytes += length;
  return mr;
}

Status Fabric::DeregisterMr(MrId id) {
  std::lock_guard lock(mu_);
  auto it = mrs_.find(id);
  if (it == mrs_.end()) return Status(ErrorCode::kUnknownObject);
  const MemoryRegion& mr = it->second;
  Node& n = *nodes_[mr.node];
  n.arena.Free(mr.base, mr.length);
  --n.mrs;
  n.registered_bytes -= mr.length;
  rkey_index_.erase(mr.remote_key);
  used_keys_.erase(mr.remote_key);
  used_keys_.erase(mr.local_key);
  mrs_.erase(it);
  return Status::Ok();
}

Result<MemoryRegion> Fabric::GetMr(MrId id) const {
  std::lock_guard lock(mu_);
  auto it = mrs_.find(id);
  if (it == mrs_.end()) return Status(ErrorCode::kUnknownObject);
  return it->second;
}

Result<std::span<std::byte>> Fabric::MrBytes(MrId id) {
  std::lock_guard lock(mu_);
  auto it = mrs_.find(id);
  if (it == mrs_.end()) return Status(ErrorCode::kUnknownObject);
  const MemoryRegion& mr = it->second;
  return std::span<std::byte>(nodes_[mr.node]->arena.data() + mr.base,
                              mr.length);
}

std::byte* Fabric::AddressLocked(const MemoryRegion& mr, uint64_t offset) {
  return nodes_[mr.node]->arena.data() + mr.base + offset;
}

Status Fabric::ValidateLocalLocked(NodeId node, const LocalSlice& s) const {
  auto it = mrs_.find(s.mr);
  if (it == mrs_.end() || it->second.node != node) {
    return Status(ErrorCode::kBadLkey, "local region not registered here");
  }
  if (!SliceFits(s.offset, s.length, it->second.length)) {
    return Status(ErrorCode::kBadLkey, "local slice outside region");
  }
  return Status::Ok();
}

const MemoryRegion* Fabric::FindByRkeyLocked(NodeId node,
                                             uint32_t rkey) const {
  auto it = rkey_index_.find(rkey);
  if (it == rkey_index_.end()) return nullptr;
  const MemoryRegion& mr = mrs_.at(it->second);
  return mr.node == node ? &mr : nullptr;
}

Status Fabric::ValidateSendLocked(const Qp& qp, const WorkRequest& wr,
                                  size_t already_queued) const {
  const QpInfo& info = qp.info;
  if (wr.verb == Verb::kRecv || !IsLegal(info.mode, wr.verb)) {
    return Status(ErrorCode::kIllegalVerb,
                  std::string(VerbName(wr.verb)) + " on " +
                      std::string(TransportName(info.mode)));
  }
  if (wr.local.length > MaxMessageSize(info.mode, config_.nic.mtu)) {
    return Status(ErrorCode::kMsgTooLarge);
  }
  if (wr.remote.has_value() != IsOneSided(wr.verb)) {
    return Status(ErrorCode::kInvalidArgument,
                  "remote slice required exactly for READ/WRITE");
  }
  if (wr.imm_data.has_value() && wr.verb != Verb::kSend) {
    return Status(ErrorCode::kInvalidArgument, "imm_data only on SEND");
  }
  NodeId target_node = 0;
  if (info.mode == TransportMode::kUD) {
    if (!wr.ud_destination.has_value()) {
      return Status(ErrorCode::kInvalidArgument, "UD WR needs a destination");
    }
    auto dest = qps_.find(wr.ud_destination->qp);
    if (dest == qps_.end() || dest->second.info.node != wr.ud_destination->node ||
        dest->second.info.mode != TransportMode::kUD) {
      return Status(ErrorCode::kInvalidArgument, "UD destination unknown");
    }
    target_node = wr.ud_destination->node;
  } else {
    if (info.state != QpState::kReady || !info.peer.has_value()) {
      return Status(ErrorCode::kNotReady, "queue pair not connected");
    }
    auto peer = qps_.find(*info.peer);
    if (peer == qps_.end()) {
      return Status(ErrorCode::kNotReady, "peer queue pair destroyed");
    }
    target_node = peer->second.info.node;
  }
  RAAS_RETURN_IF_ERROR(ValidateLocalLocked(info.node, wr.local));
  if (wr.remote.has_value()) {
    const MemoryRegion* mr = FindByRkeyLocked(target_node, wr.remote->remote_key);
    if (mr == nullptr ||
        !SliceFits(wr.remote->offset, wr.local.length, mr->length)) {
      return Status(ErrorCode::kBadRkey);
    }
  }
  if (qp.send_queue.size() + already_queued >= config_.max_send_wr) {
    return Status(ErrorCode::kQueueFull);
  }
  return Status::Ok();
}

Status Fabric::PostSend(QpId id, const WorkRequest& wr) {
  const BatchResult r = PostBatch(id, std::span<const WorkRequest>(&wr, 1));
  return r.error;
}

BatchResult Fabric::PostBatch(QpId id, std::span<const WorkRequest> wrs) {
  std::lock_guard lock(mu_);
  BatchResult result;
  auto it = qps_.find(id);
  if (it == qps_.end()) {
    result.error = Status(ErrorCode::kUnknownObject, "no such qp");
    return result;
  }
  Qp& qp = it->second;
  for (size_t i = 0; i < wrs.size(); ++i) {
    Status s = ValidateSendLocked(qp, wrs[i], i);
    if (!s.ok()) {
      result.error = std::move(s);
      result.error_index = i;
      break;
    }
    ++result.accepted;
  }
  const bool batched = result.accepted >= 2;
  for (size_t i = 0; i < result.accepted; ++i) {
    qp.send_queue.push_back(PendingWr{wrs[i], batched, now_ns_});
  }
  if (result.accepted > 0) {
    nodes_[qp.info.node]->pending_qps.insert(id);
    pending_ += result.accepted;
  }
  return result;
}

Status Fabric::PostRecv(QpId id, const WorkRequest& wr) {
  std::lock_guard lock(mu_);
  auto it = qps_.find(id);
  if (it == qps_.end()) return Status(ErrorCode::kUnknownObject);
  Qp& qp = it->second;
  if (qp.info.srq.has_value()) {
    return Status(ErrorCode::kInvalidArgument,
                  "queue pair receives through its shared receive queue");
  }
  if (wr.verb != Verb::kRecv) return Status(ErrorCode::kInvalidArgument);
  RAAS_RETURN_IF_ERROR(ValidateLocalLocked(qp.info.node, wr.local));
  if (qp.recv_queue.size() >= config_.max_recv_wr) {
    return Status(ErrorCode::kQueueFull);
  }
  qp.recv_queue.push_back(wr);
  return Status::Ok();
}

Status Fabric::PostSrqRecv(SrqId id, const WorkRequest& wr) {
  std::lock_guard lock(mu_);
  auto it = srqs_.find(id);
  if (it == srqs_.end()) return Status(ErrorCode::kUnknownObject);
  Srq& srq = it->second;
  if (wr.verb != Verb::kRecv) return Status(ErrorCode::kInvalidArgument);
  RAAS_RETURN_IF_ERROR(ValidateLocalLocked(srq.node, wr.local));
  if (srq.recv_queue.size() >= srq.max_wr) return Status(ErrorCode::kQueueFull);
  srq.recv_queue.push_back(wr);
  return Status::Ok();
}

void Fabric::CompleteLocked(CqId cq, CompletionEntry entry) {
  auto it = cqs_.find(cq);
  if (it == cqs_.end()) return;
  if (entry.side == CompletionSide::kSend) {
    auto qp = qps_.find(entry.qp_id);
    if (qp != qps_.end()) {
      entry.timestamp_ns =
          std::max(entry.timestamp_ns, qp->second.last_send_cqe_ns);
      qp->second.last_send_cqe_ns = entry.timestamp_ns;
    }
  }
  const CqEntryKey key{entry.timestamp_ns, entry.qp_id, completion_seq_++};
  it->second.entries.push(QueuedCompletion{key, std::move(entry)});
}

void Fabric::ExecuteLocked(Node& node, NodeId node_id, Qp& qp,
                           PendingWr& pending) {
  const WorkRequest& wr = pending.wr;
  const uint64_t len = wr.local.length;
  const NicServiceResult service =
      node.nic.ServiceWorkRequest(qp.info.id, len, pending.batched);
  const uint64_t start = std::max(node.nic_busy_until, pending.post_ns);
  const uint64_t done = start + service.cost_ns;
  node.nic_busy_until = done;
  node.traffic.work_requests++;
  node.traffic.bytes += len;
  node.traffic.service_ns += service.cost_ns;
  if (trace_ != nullptr) {
    *trace_ << start << ',' << node_id << ',' << qp.info.id << ','
            << VerbName(wr.verb) << ',' << len << ','
            << (service.hit ? 1 : 0) << '\n';
  }

  CompletionEntry sender;
  sender.wr_id = wr.wr_id;
  sender.qp_id = qp.info.id;
  sender.side = CompletionSide::kSend;
  sender.verb = wr.verb;
  sender.byte_count = len;

  const uint64_t prop = config_.propagation_ns;
  const bool peer_gone = qp.info.mode != TransportMode::kUD &&
                         (!qp.info.peer.has_value() ||
                          qps_.find(*qp.info.peer) == qps_.end());
  const auto local_it = mrs_.find(wr.local.mr);
  if (peer_gone || local_it == mrs_.end()) {
    sender.status = CompletionStatus::kTransportError;
    sender.byte_count = 0;
    sender.timestamp_ns = done;
    CompleteLocked(qp.info.cq, sender);
    return;
  }
  const MemoryRegion& local = local_it->second;

  if (IsOneSided(wr.verb)) {
    const NodeId target_node = qps_.at(*qp.info.peer).info.node;
    const MemoryRegion* remote =
        FindByRkeyLocked(target_node, wr.remote->remote_key);
    if (remote == nullptr ||
        !SliceFits(wr.remote->offset, len, remote->length)) {
      // Region went away between post and execution.
      sender.status = CompletionStatus::kRemoteAccessError;
      sender.byte_count = 0;
      sender.timestamp_ns = done + prop;
      CompleteLocked(qp.info.cq, sender);
      return;
    }
    std::byte* local_ptr = AddressLocked(local, wr.local.offset);
    std::byte* remote_ptr = AddressLocked(*remote, wr.remote->offset);
    if (wr.verb == Verb::kWrite) {
      std::memmove(remote_ptr, local_ptr, len);
      sender.timestamp_ns = done + prop;
    } else {
      std::memmove(local_ptr, remote_ptr, len);
      sender.timestamp_ns = done + 2 * prop;
    }
    if (wr.signaled) CompleteLocked(qp.info.cq, sender);
    return;
  }

  // Two-sided SEND.
  const QpId target_id = qp.info.mode == TransportMode::kUD
                             ? wr.ud_destination->qp
                             : *qp.info.peer;
  auto target_it = qps_.find(target_id);
  const bool reliable = qp.info.mode == TransportMode::kRC;
  std::deque<WorkRequest>* recv_queue = nullptr;
  if (target_it != qps_.end()) {
    Qp& target = target_it->second;
    recv_queue = target.info.srq.has_value()
                     ? &srqs_.at(*target.info.srq).recv_queue
                     : &target.recv_queue;
  }
  if (recv_queue == nullptr || recv_queue->empty()) {
    if (reliable) {
      sender.status = CompletionStatus::kRnrError;
      sender.byte_count = 0;
      sender.timestamp_ns = done + config_.rnr_window_ns;
      CompleteLocked(qp.info.cq, sender);
    } else if (wr.signaled) {
      sender.timestamp_ns = done;  // unreliable: silently dropped
      CompleteLocked(qp.info.cq, sender);
    }
    return;
  }
  Qp& target = target_it->second;
  const WorkRequest recv = recv_queue->front();
  recv_queue->pop_front();
  Node& rnode = *nodes_[target.info.node];
  const NicServiceResult rservice =
      rnode.nic.ServiceWorkRequest(target.info.id, len, false);
  const uint64_t rstart = std::max(rnode.nic_busy_until, done + prop);
  const uint64_t rdone = rstart + rservice.cost_ns;
  rnode.nic_busy_until = rdone;
  rnode.traffic.service_ns += rservice.cost_ns;

  CompletionEntry receiver;
  receiver.wr_id = recv.wr_id;
  receiver.qp_id = target.info.id;
  receiver.side = CompletionSide::kRecv;
  receiver.verb = Verb::kRecv;
  receiver.imm_data = wr.imm_data;
  receiver.timestamp_ns = rdone;
  receiver.source_node = node_id;
  receiver.source_qp = qp.info.id;
  if (len > recv.local.length) {
    receiver.status = CompletionStatus::kLengthError;
    receiver.byte_count = 0;
    sender.status = CompletionStatus::kLengthError;
    sender.byte_count = 0;
  } else {
    const MemoryRegion& rmr = mrs_.at(recv.local.mr);
    std::memmove(AddressLocked(rmr, recv.local.offset),
                 AddressLocked(local, wr.local.offset), len);
    receiver.byte_count = len;
  }
  CompleteLocked(target.info.cq, receiver);
  sender.timestamp_ns = reliable ? rdone + prop : done;
  if (wr.signaled || sender.status != CompletionStatus::kSuccess) {
    CompleteLocked(qp.info.cq, sender);
  }
}

bool Fabric::ExecuteOneLocked() {
  // Pick the node whose NIC can start its next WR the earliest.
  Node* best = nullptr;
  NodeId best_id = 0;
  QpId best_qp = 0;
  uint64_t best_start = std::numeric_limits<uint64_t>::max();
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    Node& node = *nodes_[id];
    if (node.pending_qps.empty()) continue;
    auto next = node.pending_qps.lower_bound(node.rr_cursor);
    if (next == node.pending_qps.end()) next = node.pending_qps.begin();
    const QpId qp_id = *next;
    const uint64_t start = std::max(
        node.nic_busy_until, qps_.at(qp_id).send_queue.front().post_ns);
    if (start < best_start) {
      best = &node;
      best_id = id;
      best_qp = qp_id;
      best_start = start;
    }
  }
  if (best == nullptr) return false;
  Qp& qp = qps_.at(best_qp);
  PendingWr pending = std::move(qp.send_queue.front());
  qp.send_queue.pop_front();
  --pending_;
  if (qp.send_queue.empty()) best->pending_qps.erase(best_qp);
  best->rr_cursor = best_qp + 1;
  ExecuteLocked(*best, best_id, qp, pending);
  return true;
}

size_t Fabric::ProgressLocked() {
  size_t ran = 0;
  while (ExecuteOneLocked()) ++ran;
  return ran;
}

size_t Fabric::Progress() {
  std::lock_guard lock(mu_);
  return ProgressLocked();
}

std::vector<CompletionEntry> Fabric::PollCq(CqId cq, size_t max_entries) {
  std::lock_guard lock(mu_);
  ProgressLocked();
  std::vector<CompletionEntry> out;
  auto it = cqs_.find(cq);
  if (it == cqs_.end()) return out;
  auto& entries = it->second.entries;
  while (!entries.empty() && out.size() < max_entries) {
    out.push_back(entries.top().entry);
    entries.pop();
    now_ns_ = std::max(now_ns_, out.back().timestamp_ns);
  }
  return out;
}

Result<NicServiceResult> Fabric::NicService(QpId id) {
  std::lock_guard lock(mu_);
  auto it = qps_.find(id);
  if (it == qps_.end()) return Status(ErrorCode::kUnknownObject);
  return nodes_[it->second.info.node]->nic.Service(id);
}

uint64_t Fabric::now_ns() const {
  std::lock_guard lock(mu_);
  return now_ns_;
}

void Fabric::AdvanceTo(uint64_t ts) {
  std::lock_guard lock(mu_);
  now_ns_ = std::max(now_ns_, ts);
}

size_t Fabric::SrqDepth(SrqId id) const {
  std::lock_guard lock(mu_);
  auto it = srqs_.find(id);
  return it == srqs_.end() ? 0 : it->second.recv_queue.size();
}

size_t Fabric::RecvDepth(QpId id) const {
  std::lock_guard lock(mu_);
  auto it = qps_.find(id);
  return it == qps_.end() ? 0 : it->second.recv_queue.size();
}

size_t Fabric::SendQueueDepth(QpId id) const {
  std::lock_guard lock(mu_);
  auto it = qps_.find(id);
  return it == qps_.end() ? 0 : it->second.send_queue.size();
}

size_t Fabric::PendingWorkRequests() const {
  std::lock_guard lock(mu_);
  return pending_;
}

NicCounters Fabric::nic_counters(NodeId node) const {
  std::lock_guard lock(mu_);
  return node < nodes_.size() ? nodes_[node]->nic.counters() : NicCounters{};
}

bool Fabric::IsContextCached(QpId id) const {
  std::lock_guard lock(mu_);
  auto it = qps_.find(id);
  if (it == qps_.end()) return false;
  return nodes_[it->second.info.node]->nic.IsCached(id);
}

void Fabric::ResetCounters() {
  std::lock_guard lock(mu_);
  for (auto& node : nodes_) {
    node->nic.ResetCounters();
    node->traffic = {};
  }
}

NodeResources Fabric::resources(NodeId node) const {
  std::lock_guard lock(mu_);
  NodeResources r;
  if (node >= nodes_.size()) return r;
  const Node& n = *nodes_[node];
  for (const auto& [id, qp] : qps_) {
    if (qp.info.node == node) ++r.qps;
  }
  r.cqs = n.cqs;
  r.srqs = n.srqs;
  r.mrs = n.mrs;
  r.registered_bytes = n.registered_bytes;
  return r;
}

NodeTraffic Fabric::traffic(NodeId node) const {
  std::lock_guard lock(mu_);
  return node < nodes_.size() ? nodes_[node]->traffic : NodeTraffic{};
}

void Fabric::SetTrace(std::ostream* out) {
  std::lock_guard lock(mu_);
  trace_ = out;
}

}  // namespace raas::verbs
