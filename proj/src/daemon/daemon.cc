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

#include "daemon/daemon_state.h"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>

namespace raas {

using ipc::RequestOp;
using ipc::RequestRecord;
using ipc::ResponseRecord;
using verbs::CompletionEntry;
using verbs::CompletionStatus;
using verbs::MemoryRegion;
using verbs::NodeId;
using verbs::QpId;
using verbs::TransportMode;
using verbs::Verb;
using verbs::WorkRequest;

namespace {

constexpr auto kStopTimeout = std::chrono::seconds(5);
// A stopping worker gives up on requests that made no progress for this long.
constexpr auto kStopStall = std::chrono::milliseconds(250);

}  // namespace

// ---------------------------------------------------------------------------
// Config

Result<DaemonConfig> DaemonConfig::FromConfig(KeyValueConfig& config) {
  DaemonConfig out;
  uint64_t v = 0;
  auto take32 = [&](std::string_view key, uint32_t& field) -> Status {
    v = field;
    RAAS_RETURN_IF_ERROR(config.TakeUint(key, v));
    if (v > UINT32_MAX) return Status(ErrorCode::kBadConfig, std::string(key));
    field = static_cast<uint32_t>(v);
    return Status::Ok();
  };
  RAAS_RETURN_IF_ERROR(take32("worker_count", out.worker_count));
  RAAS_RETURN_IF_ERROR(take32("qps_per_node", out.qps_per_node));
  RAAS_RETURN_IF_ERROR(take32("srq_depth", out.srq_depth));
  RAAS_RETURN_IF_ERROR(take32("srq_low_watermark", out.srq_low_watermark));
  RAAS_RETURN_IF_ERROR(take32("srq_pool_factor", out.srq_pool_factor));
  RAAS_RETURN_IF_ERROR(take32("ring_capacity", out.ring_capacity));
  RAAS_RETURN_IF_ERROR(config.TakeUint("window_bytes", out.window_bytes));
  RAAS_RETURN_IF_ERROR(
      config.TakeUint("worker_request_ns", out.worker_request_ns));
  uint64_t threaded = out.threaded ? 1 : 0;
  RAAS_RETURN_IF_ERROR(config.TakeUint("threaded", threaded));
  out.threaded = threaded != 0;
  RAAS_RETURN_IF_ERROR(config.TakeString("nic_model_path", out.nic_model_path));
  RAAS_RETURN_IF_ERROR(out.policy.FromConfig(config));
  RAAS_RETURN_IF_ERROR(out.Validate());
  return out;
}

Status DaemonConfig::Validate() const {
  if (worker_count == 0) {
    return Status(ErrorCode::kBadConfig, "worker_count must be at least 1");
  }
  if (srq_depth == 0 || srq_low_watermark > srq_depth) {
    return Status(ErrorCode::kBadConfig, "bad srq_depth/srq_low_watermark");
  }
  if (srq_pool_factor == 0) {
    return Status(ErrorCode::kBadConfig, "srq_pool_factor must be positive");
  }
  if (ring_capacity < 2 || !std::has_single_bit(ring_capacity)) {
    return Status(ErrorCode::kBadConfig, "ring_capacity must be a power of two");
  }
  if (window_bytes == 0) {
    return Status(ErrorCode::kBadConfig, "window_bytes must be positive");
  }
  return policy.Validate();
}

// ---------------------------------------------------------------------------
// Cluster

Cluster::Cluster(verbs::Fabric& fabric, uint64_t vqpn_limit)
    : fabric_(fabric), vqpns_(vqpn_limit) {}

Result<NodeId> Cluster::AddHost(const Addr& addr) {
  std::lock_guard lock(mu_);
  const std::string key = addr.NodeKey();
  if (names_.contains(key)) {
    return Status(ErrorCode::kAddressInUse, key);
  }
  const NodeId node = fabric_.AddNode();
  names_[key] = node;
  primary_[node] = addr;
  return node;
}

Status Cluster::AddAlias(const Addr& addr, NodeId node) {
  std::lock_guard lock(mu_);
  if (!fabric_.HasNode(node)) return Status(ErrorCode::kNodeUnknown);
  const std::string key = addr.NodeKey();
  auto [it, inserted] = names_.emplace(key, node);
  if (!inserted && it->second != node) {
    return Status(ErrorCode::kAddressInUse, key);
  }
  return Status::Ok();
}

Result<NodeId> Cluster::Resolve(const Addr& addr) const {
  std::lock_guard lock(mu_);
  auto it = names_.find(addr.NodeKey());
  if (it == names_.end()) {
    return Status(ErrorCode::kDestUnreachable, addr.ToString());
  }
  return it->second;
}

// ---------------------------------------------------------------------------
// Lifecycle

Daemon::Daemon(Cluster& cluster, NodeId node, DaemonConfig config)
    : cluster_(cluster),
      fabric_(cluster.fabric()),
      node_(node),
      config_(std::move(config)) {}

Result<std::unique_ptr<Daemon>> Daemon::Start(Cluster& cluster, NodeId node,
                                              DaemonConfig config) {
  RAAS_RETURN_IF_ERROR(config.Validate());
  if (!cluster.fabric().HasNode(node)) {
    return Status(ErrorCode::kNodeUnknown, "no such fabric node");
  }
  std::unique_ptr<Daemon> d(new Daemon(cluster, node, std::move(config)));
  {
    std::lock_guard lock(cluster.mu_);
    if (cluster.daemons_.contains(node)) {
      return Status(ErrorCode::kDaemonExists, "node already has a daemon");
    }
    cluster.daemons_[node] = d.get();
  }
  if (Status s = d->Init(); !s.ok()) {
    std::lock_guard lock(cluster.mu_);
    cluster.daemons_.erase(node);
    d->stopped_ = true;
    return s;
  }
  if (d->config_.threaded) {
    // Counted up front so live_threads() is exact as soon as Start returns.
    d->live_threads_ = d->workers_.size() + 1;
    for (size_t i = 0; i < d->workers_.size(); ++i) {
      d->threads_.emplace_back([raw = d.get(), i] { raw->WorkerLoop(i); });
    }
    d->threads_.emplace_back([raw = d.get()] { raw->PollerLoop(); });
  }
  return d;
}

Status Daemon::Init() {
  auto cq = fabric_.CreateCq(node_);
  RAAS_RETURN_IF_ERROR(cq.status());
  cq_ = *cq;
  auto srq = fabric_.CreateSrq(node_, config_.srq_depth);
  RAAS_RETURN_IF_ERROR(srq.status());
  srq_ = *srq;

  slot_bytes_ = kSendHeadroom + config_.policy.small_msg_threshold;
  const uint64_t slots =
      uint64_t{config_.srq_depth} * config_.srq_pool_factor;
  auto pool = fabric_.RegisterMr(node_, slots * slot_bytes_);
  RAAS_RETURN_IF_ERROR(pool.status());
  pool_mr_ = *pool;
  pool_bytes_ = *fabric_.MrBytes(pool_mr_.id);
  for (uint64_t s = slots; s > 0; --s) {
    free_slots_.push_back(static_cast<uint32_t>(s - 1));
  }
  free_slot_count_ = free_slots_.size();
  slot_holder_.assign(slots, 0);

  auto bell = ipc::EventChannel::Create();
  RAAS_RETURN_IF_ERROR(bell.status());
  poller_bell_ = std::make_shared<ipc::EventChannel>(std::move(*bell));

  load_ = std::make_shared<LoadCell>(config_.worker_count);
  for (uint32_t i = 0; i < config_.worker_count; ++i) {
    auto w = std::make_unique<Worker>();
    w->index = i;
    auto ch = ipc::EventChannel::Create();
    RAAS_RETURN_IF_ERROR(ch.status());
    w->doorbell = std::move(*ch);
    w->notes = *ipc::SpscRing<Note>::Create(4096);
    w->credits = *ipc::SpscRing<Connection*>::Create(4096);
    workers_.push_back(std::move(w));
  }

  // Fill the SRQ completely; the poller tops it up below the watermark.
  while (fabric_.SrqDepth(srq_) < config_.srq_depth && !free_slots_.empty()) {
    const uint32_t slot = free_slots_.back();
    free_slots_.pop_back();
    WorkRequest wr;
    wr.wr_id = slot;
    wr.verb = Verb::kRecv;
    wr.local = {pool_mr_.id, slot * slot_bytes_, slot_bytes_};
    RAAS_RETURN_IF_ERROR(fabric_.PostSrqRecv(srq_, wr));
  }
  free_slot_count_ = free_slots_.size();
  return Status::Ok();
}

Daemon::~Daemon() { Stop(); }

void Daemon::Stop() {
  if (stopped_.exchange(true)) return;
  stopping_ = true;
  if (!threads_.empty()) {
    for (auto& w : workers_) w->doorbell.Signal();
    poller_bell_->Signal();
    for (auto& t : threads_) t.join();
    threads_.clear();
  } else {
    bool abandoned = false;
    auto deadline = std::chrono::steady_clock::now() + kStopStall;
    const auto hard_deadline = std::chrono::steady_clock::now() + kStopTimeout;
    while (!Quiescent() && std::chrono::steady_clock::now() < hard_deadline) {
      size_t progress = PollerPoll();
      for (size_t i = 0; i < workers_.size(); ++i) {
        progress += WorkerDrain(i) + workers_[i]->handled_this_drain;
      }
      const auto now = std::chrono::steady_clock::now();
      if (progress > 0) {
        deadline = now + kStopStall;
      } else if (now >= deadline) {
        if (abandoned) break;
        for (auto& w : workers_) w->abandoning = true;
        abandoned = true;
        deadline = now + kStopStall;
      }
    }
  }

  std::lock_guard lock(cluster_.mu_);
  cluster_.daemons_.erase(node_);
  for (auto& [fd, l] : listeners_) l->closed = true;
  cluster_.accept_cv_.notify_all();
  for (auto& c : all_connections_) {
    c->open = false;
    if (auto peer = c->peer.lock()) {
      peer->peer_gone = true;
      peer->events.Signal();
    }
    c->peer_gone = true;
    c->events.Signal();
  }
  for (auto& [key, qp] : shared_qps_) (void)fabric_.DestroyQp(qp);
  for (auto& c : all_connections_) {
    if (!c->released) {
      (void)fabric_.DeregisterMr(c->window.id);
      (void)fabric_.DeregisterMr(c->control.id);
    }
  }
  for (auto& [mr, app] : app_mrs_) (void)fabric_.DeregisterMr(mr);
  app_mrs_.clear();
  if (pool_mr_.id != 0) (void)fabric_.DeregisterMr(pool_mr_.id);
}

size_t Daemon::live_threads() const { return live_threads_.load(); }

void Daemon::WorkerLoop(size_t index) {
  Worker& w = *workers_[index];
  const auto idle_wait = std::chrono::microseconds(1000);
  std::optional<std::chrono::steady_clock::time_point> deadline;
  std::optional<std::chrono::steady_clock::time_point> hard_deadline;
  for (;;) {
    const size_t posted = WorkerDrain(index);
    const bool did_work = posted > 0 || w.handled_this_drain > 0;
    if (stopping_) {
      if (!hard_deadline) {
        hard_deadline = std::chrono::steady_clock::now() + kStopTimeout;
      }
      if (!deadline || did_work) {
        deadline = std::chrono::steady_clock::now() + kStopStall;
      }
      bool drained = w.pending_notes.empty();
      const size_t n = w.conns.size();
      for (size_t i = 0; i < n && drained; ++i) {
        Connection& c = *w.conns[i];
        drained = c.requests->empty() && c.deferred.empty();
      }
      if (drained) break;
      const auto now = std::chrono::steady_clock::now();
      if (now >= *deadline) w.abandoning = true;
      if (now >= *hard_deadline) {
        for (size_t i = 0; i < n; ++i) AbandonDeferred(w, *w.conns[i]);
        w.deferred_count = 0;
        FlushNotes(w);
        break;
      }
    }
    if (!did_work) {
      (void)w.doorbell.Wait(stopping_ ? std::chrono::microseconds(100) : idle_wait);
    }
  }
  w.exited = true;
  poller_bell_->Signal();
  live_threads_--;
}

void Daemon::AbandonDeferred(Worker& w, Connection& c) {
  while (!c.deferred.empty()) {
    const RequestRecord& r = c.deferred.front();
    RespondFromWorker(w, c,
                      ResponseRecord{static_cast<uint8_t>(r.op),
                                     ErrorCode::kShutdown, c.fd, 0, 0, 0, 0,
                                     r.seq});
    c.deferred.pop_front();
  }
}

void Daemon::PollerLoop() {
  std::optional<std::chrono::steady_clock::time_point> deadline;
  for (;;) {
    const size_t delivered = PollerPoll();
    if (stopping_) {
      if (!deadline) deadline = std::chrono::steady_clock::now() + kStopTimeout;
      const bool workers_done = std::all_of(
          workers_.begin(), workers_.end(),
          [](const auto& w) { return w->exited.load(); });
      if ((workers_done && Quiescent()) ||
          std::chrono::steady_clock::now() >= *deadline + kStopTimeout) {
        break;
      }
    }
    if (delivered == 0) {
      (void)poller_bell_->Wait(std::chrono::microseconds(stopping_ ? 50 : 200));
    }
  }
  live_threads_--;
}

bool Daemon::Quiescent() const {
  for (const auto& w : workers_) {
    if (!w->notes->empty()) return false;
    if (w->deferred_count.load() != 0) return false;
    const size_t n = w->conns.size();
    for (size_t i = 0; i < n; ++i) {
      const Connection& c = *w->conns[i];
      if (!c.requests->empty() || !c.inflight->empty()) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Control plane

AppId Daemon::RegisterApp() {
  std::lock_guard lock(cluster_.mu_);
  return next_app_++;
}

Result<MemoryRegion> Daemon::RegisterAppMemory(AppId app, uint64_t length) {
  auto mr = fabric_.RegisterMr(node_, length);
  RAAS_RETURN_IF_ERROR(mr.status());
  std::lock_guard lock(cluster_.mu_);
  app_mrs_[mr->id] = app;
  return mr;
}

Status Daemon::DeregisterAppMemory(AppId app, verbs::MrId mr) {
  {
    std::lock_guard lock(cluster_.mu_);
    auto it = app_mrs_.find(mr);
    if (it == app_mrs_.end() || it->second != app) {
      return Status(ErrorCode::kBadMr, "region not owned by application");
    }
    app_mrs_.erase(it);
  }
  return fabric_.DeregisterMr(mr);
}

bool Daemon::OwnsMemory(AppId app, verbs::MrId mr) const {
  std::lock_guard lock(cluster_.mu_);
  auto it = app_mrs_.find(mr);
  return it != app_mrs_.end() && it->second == app;
}

Result<uint32_t> Daemon::Listen(AppId app, const Addr& addr) {
  const std::string key = addr.ToString();
  auto node = cluster_.Resolve(addr);
  RAAS_RETURN_IF_ERROR(node.status());
  if (*node != node_) {
    return Status(ErrorCode::kDestUnreachable, "address is not local: " + key);
  }
  std::lock_guard lock(cluster_.mu_);
  if (stopping_) return Status(ErrorCode::kShutdown);
  if (listen_addrs_.contains(key)) return Status(ErrorCode::kAddressInUse, key);
  const uint32_t fd = next_fd_++;
  auto l = std::make_unique<Listener>();
  l->app = app;
  l->addr = addr;
  listeners_[fd] = std::move(l);
  listen_addrs_[key] = fd;
  return fd;
}

Result<FdEndpoint> Daemon::Accept(
    AppId app, uint32_t listen_fd,
    std::optional<std::chrono::milliseconds> timeout) {
  std::unique_lock lock(cluster_.mu_);
  auto it = listeners_.find(listen_fd);
  if (it == listeners_.end() || it->second->app != app || it->second->closed) {
    return Status(ErrorCode::kBadFd, "not an open listening fd");
  }
  Listener& l = *it->second;
  auto ready = [&] { return !l.pending.empty() || l.closed; };
  if (timeout.has_value()) {
    if (!cluster_.accept_cv_.wait_for(lock, *timeout, ready)) {
      return Status(ErrorCode::kTimeout, "no incoming connection");
    }
  } else {
    cluster_.accept_cv_.wait(lock, ready);
  }
  if (l.pending.empty()) {
    return Status(ErrorCode::kClosedWhileWaiting, "listener closed");
  }
  std::shared_ptr<Connection> c = std::move(l.pending.front());
  l.pending.pop_front();
  return EndpointOf(*c);
}

Status Daemon::CloseListener(AppId app, uint32_t listen_fd) {
  std::lock_guard lock(cluster_.mu_);
  auto it = listeners_.find(listen_fd);
  if (it == listeners_.end() || it->second->app != app || it->second->closed) {
    return Status(ErrorCode::kBadFd, "not an open listening fd");
  }
  Listener& l = *it->second;
  l.closed = true;
  listen_addrs_.erase(l.addr.ToString());
  // Connections nobody accepted look closed to their initiators.
  for (auto& c : l.pending) {
    if (auto peer = c->peer.lock()) {
      peer->peer_gone = true;
      peer->events.Signal();
    }
  }
  l.pending.clear();
  cluster_.accept_cv_.notify_all();
  return Status::Ok();
}

Result<QpId> Daemon::SharedQpLocked(NodeId peer_node, uint32_t shard,
                                    Daemon& peer) {
  auto it = shared_qps_.find({peer_node, shard});
  if (it != shared_qps_.end()) return it->second;
  auto mine = fabric_.CreateQp(node_, TransportMode::kRC, cq_, srq_);
  RAAS_RETURN_IF_ERROR(mine.status());
  auto theirs = fabric_.CreateQp(peer_node, TransportMode::kRC, peer.cq_,
                                 peer.srq_);
  if (!theirs.ok()) {
    (void)fabric_.DestroyQp(*mine);
    return theirs.status();
  }
  RAAS_RETURN_IF_ERROR(fabric_.ConnectQp(*mine, *theirs));
  shared_qps_[{peer_node, shard}] = *mine;
  peer.shared_qps_[{node_, shard}] = *theirs;
  return *mine;
}

Result<std::shared_ptr<Daemon::Connection>> Daemon::NewConnectionLocked(
    AppId app, uint32_t vqpn, uint32_t shard, QpId qp, const Addr& dest,
    NodeId peer_node, Flags flags) {
  auto c = std::make_shared<Connection>();
  c->vqpn = vqpn;
  c->app = app;
  c->dest = dest;
  c->peer_node = peer_node;
  c->default_flags = flags;
  c->shard = shard;
  c->worker = shard % workers_.size();
  c->qp = qp;
  c->requests = *WireRing::Create(config_.ring_capacity);
  c->responses = *WireRing::Create(config_.ring_capacity);
  c->inflight = *ipc::SpscRing<Inflight>::Create(
      std::bit_ceil(size_t{2} * config_.ring_capacity));
  auto events = ipc::EventChannel::Create();
  RAAS_RETURN_IF_ERROR(events.status());
  c->events = std::move(*events);
  auto window = fabric_.RegisterMr(node_, config_.window_bytes);
  RAAS_RETURN_IF_ERROR(window.status());
  c->window = *window;
  auto control = fabric_.RegisterMr(node_, kControlBytes);
  if (!control.ok()) {
    (void)fabric_.DeregisterMr(c->window.id);
    return control.status();
  }
  c->control = *control;
  c->control_bytes = *fabric_.MrBytes(c->control.id);
  c->fd = next_fd_++;
  return c;
}

void Daemon::PublishLocked(const std::shared_ptr<Connection>& c) {
  fds_[c->fd] = c;
  all_connections_.push_back(c);
  demux_.Set(c->vqpn, c.get());
  workers_[c->worker]->conns.Append(c.get());
}

FdEndpoint Daemon::EndpointOf(Connection& c) {
  FdEndpoint e;
  e.fd = c.fd;
  e.vqpn = c.vqpn;
  e.dest = c.dest;
  e.default_flags = c.default_flags;
  e.requests = c.requests.get();
  e.responses = c.responses.get();
  e.events = &c.events;
  e.doorbell = &workers_[c.worker]->doorbell;
  e.peer_gone = &c.peer_gone;
  e.max_send_payload = c.peer_slot_payload;
  e.window_bytes = std::min(c.peer_window_len, c.window.length);
  return e;
}

Result<FdEndpoint> Daemon::Connect(AppId app, const Addr& dest, Flags flags) {
  RAAS_RETURN_IF_ERROR(flags.Validate());
  auto node = cluster_.Resolve(dest);
  RAAS_RETURN_IF_ERROR(node.status());

  std::lock_guard lock(cluster_.mu_);
  if (stopping_) return Status(ErrorCode::kShutdown);
  if (*node == node_) {
    return Status(ErrorCode::kDestUnreachable,
                  "connections within one node are not supported");
  }
  auto peer_it = cluster_.daemons_.find(*node);
  if (peer_it == cluster_.daemons_.end() || peer_it->second->stopping_) {
    return Status(ErrorCode::kDestUnreachable, "no daemon at destination");
  }
  Daemon& peer = *peer_it->second;
  auto listen_it = peer.listen_addrs_.find(dest.ToString());
  if (listen_it == peer.listen_addrs_.end()) {
    return Status(ErrorCode::kDestUnreachable, "nobody listens at " +
                                                   dest.ToString());
  }
  Listener& listener = *peer.listeners_.at(listen_it->second);

  auto vqpn = cluster_.vqpns_.Allocate();
  RAAS_RETURN_IF_ERROR(vqpn.status());
  auto lease = std::make_shared<VqpnLease>(cluster_.vqpns_, *vqpn);

  const uint32_t shard =
      *vqpn % std::min(config_.shards(), peer.config_.shards());
  auto qp = SharedQpLocked(*node, shard, peer);
  RAAS_RETURN_IF_ERROR(qp.status());
  const QpId peer_qp = peer.shared_qps_.at({node_, shard});

  // The accepting side sees the initiator under its node's first address.
  const Addr self = cluster_.primary_.at(node_);

  auto mine = NewConnectionLocked(app, *vqpn, shard, *qp, dest, *node, flags);
  RAAS_RETURN_IF_ERROR(mine.status());
  auto theirs = peer.NewConnectionLocked(listener.app, *vqpn, shard, peer_qp,
                                         self, node_, Flags());
  if (!theirs.ok()) {
    (void)fabric_.DeregisterMr((*mine)->window.id);
    (void)fabric_.DeregisterMr((*mine)->control.id);
    return theirs.status();
  }
  Connection& a = **mine;
  Connection& b = **theirs;
  a.peer_window_rkey = b.window.remote_key;
  a.peer_window_len = b.window.length;
  a.peer_slot_payload = peer.slot_bytes_ - kSendHeadroom;
  a.peer_load = peer.load_;
  a.peer = *theirs;
  a.peer_bell = peer.poller_bell_;
  a.lease = lease;
  b.peer_window_rkey = a.window.remote_key;
  b.peer_window_len = a.window.length;
  b.peer_slot_payload = slot_bytes_ - kSendHeadroom;
  b.peer_load = load_;
  b.peer = *mine;
  b.peer_bell = poller_bell_;
  b.lease = lease;

  PublishLocked(*mine);
  peer.PublishLocked(*theirs);
  listener.pending.push_back(*theirs);
  cluster_.accept_cv_.notify_all();
  return EndpointOf(a);
}

Status Daemon::ReleaseFd(AppId app, uint32_t fd) {
  std::lock_guard lock(cluster_.mu_);
  auto it = fds_.find(fd);
  if (it == fds_.end() || it->second->app != app) {
    return Status(ErrorCode::kBadFd, "unknown fd");
  }
  Connection& c = *it->second;
  if (c.open) return Status(ErrorCode::kInvalidArgument, "fd not closed yet");
  c.released = true;
  demux_.Set(c.vqpn, nullptr);
  {
    std::lock_guard reclaim_lock(reclaim_mu_);
    reclaim_.push_back(std::move(c.lease));
  }
  reclaim_pending_ = true;
  poller_bell_->Signal();
  if (!stopped_) {
    (void)fabric_.DeregisterMr(c.window.id);
    (void)fabric_.DeregisterMr(c.control.id);
  }
  fds_.erase(it);
  return Status::Ok();
}

std::optional<QpId> Daemon::SharedQpOf(uint32_t fd) const {
  std::lock_guard lock(cluster_.mu_);
  auto it = fds_.find(fd);
  if (it == fds_.end()) return std::nullopt;
  return it->second->qp;
}

std::optional<uint32_t> Daemon::VqpnOfFd(uint32_t fd) const {
  std::lock_guard lock(cluster_.mu_);
  auto it = fds_.find(fd);
  if (it == fds_.end()) return std::nullopt;
  return it->second->vqpn;
}

size_t Daemon::qps_created() const {
  std::lock_guard lock(cluster_.mu_);
  return shared_qps_.size();
}

size_t Daemon::free_srq_slots() const { return free_slot_count_.load(); }

LoadStats Daemon::load() const {
  return LoadStats{load_->Mean(), fabric_.resources(node_).registered_bytes};
}

DaemonCounters Daemon::counters() const {
  DaemonCounters out;
  for (const auto& w : workers_) {
    out.requests += w->requests.load();
    out.posted_wrs += w->posted_wrs.load();
    out.batches += w->batch_count.load();
    out.rejected_posts += w->rejected.load();
  }
  out.responses = responses_.load();
  out.completed_msgs = completed_msgs_.load();
  out.completed_bytes = completed_bytes_.load();
  out.inbound_msgs = inbound_msgs_.load();
  out.unknown_vqpn = unknown_vqpn_.load();
  return out;
}

std::string Daemon::MetricsHeader() {
  return "ts,node,qps_active,cache_hit_rate,msgs,bytes,mean_ns,cpu_load,"
         "mem_units";
}

std::string Daemon::MetricsLine(uint64_t mem_unit_bytes) const {
  const verbs::NodeTraffic traffic = fabric_.traffic(node_);
  const double mean_ns =
      traffic.work_requests == 0
          ? 0.0
          : static_cast<double>(traffic.service_ns) /
                static_cast<double>(traffic.work_requests);
  const double mem_units =
      static_cast<double>(fabric_.resources(node_).registered_bytes) /
      static_cast<double>(std::max<uint64_t>(mem_unit_bytes, 1));
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%llu,%u,%zu,%.4f,%llu,%llu,%.1f,%.4f,%.3f",
                static_cast<unsigned long long>(fabric_.now_ns()), node_,
                qps_created(), fabric_.nic_counters(node_).hit_rate(),
                static_cast<unsigned long long>(completed_msgs_.load() +
                                                inbound_msgs_.load()),
                static_cast<unsigned long long>(completed_bytes_.load()),
                mean_ns, load_->Mean(), mem_units);
  return buf;
}

void Daemon::SetMetricsSink(std::ostream* out, uint64_t interval_ns,
                            uint64_t mem_unit_bytes) {
  metrics_out_ = out;
  metrics_interval_ns_ = interval_ns;
  metrics_unit_bytes_ = mem_unit_bytes;
  metrics_next_ns_ = fabric_.now_ns() + interval_ns;
}

void Daemon::MaybeEmitMetrics() {
  if (metrics_out_ == nullptr || metrics_interval_ns_ == 0) return;
  const uint64_t now = fabric_.now_ns();
  if (now < metrics_next_ns_) return;
  *metrics_out_ << MetricsLine(metrics_unit_bytes_) << '\n';
  metrics_next_ns_ = now + metrics_interval_ns_;
}

}  // namespace raas
