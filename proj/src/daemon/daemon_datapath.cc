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

#include <algorithm>

#include "daemon/daemon_state.h"
#include "raas/daemon/daemon.h"

namespace raas {

using ipc::RequestOp;
using ipc::RequestRecord;
using ipc::ResponseRecord;
using verbs::CompletionEntry;
using verbs::CompletionSide;
using verbs::CompletionStatus;
using verbs::LocalSlice;
using verbs::RemoteSlice;
using verbs::TransportMode;
using verbs::Verb;
using verbs::WorkRequest;

namespace {

// Header in front of every SEND payload: type (u32), reserved (u32),
// payload length (u64), little-endian.
void WriteHeader(std::byte* p, uint32_t type, uint64_t length) {
  for (int i = 0; i < 4; ++i) p[i] = std::byte(type >> (8 * i));
  for (int i = 4; i < 8; ++i) p[i] = std::byte{0};
  for (int i = 0; i < 8; ++i) p[8 + i] = std::byte(length >> (8 * i));
}

void ReadHeader(const std::byte* p, uint32_t& type, uint64_t& length) {
  type = 0;
  length = 0;
  for (int i = 3; i >= 0; --i) {
    type = (type << 8) | std::to_integer<uint32_t>(p[i]);
  }
  for (int i = 7; i >= 0; --i) {
    length = (length << 8) | std::to_integer<uint64_t>(p[8 + i]);
  }
}

ErrorCode CodeOf(CompletionStatus status) {
  switch (status) {
    case CompletionStatus::kSuccess: return ErrorCode::kOk;
    case CompletionStatus::kRnrError: return ErrorCode::kRnrError;
    case CompletionStatus::kRemoteAccessError: return ErrorCode::kRemoteAccessError;
    case CompletionStatus::kLengthError: return ErrorCode::kLengthError;
    case CompletionStatus::kTransportError: return ErrorCode::kTransportError;
  }
  return ErrorCode::kTransportError;
}

ResponseRecord Answer(const RequestRecord& req, uint32_t fd, ErrorCode code) {
  ResponseRecord r;
  r.op = static_cast<uint8_t>(req.op);
  r.status = code;
  r.fd = fd;
  r.seq = req.seq;
  return r;
}

}  // namespace

uint32_t Daemon::WireSeq(uint64_t seq) {
  return static_cast<uint32_t>(seq % kInternalSeq);
}

// ---------------------------------------------------------------------------
// Workers

size_t Daemon::WorkerDrain(size_t index) {
  Worker& w = *workers_[index];
  w.posted_this_drain = 0;
  w.handled_this_drain = 0;
  while (auto c = w.credits->TryPop()) (*c)->window_credit = true;
  FlushNotes(w);

  const uint32_t window = config_.policy.batching_window;
  const size_t n = w.conns.size();
  size_t deferred = 0;
  for (size_t k = 0; k < n; ++k) {
    Connection& c = *w.conns[(w.rr + k) % n];
    if (c.released) continue;
    Batch& b = BatchFor(w, c.qp);
    if (c.owe_credit) PostCredit(w, c);
    auto room = [&] {
      return b.wrs.size() < window &&
             c.inflight->size() < c.inflight->usable_capacity();
    };
    while (!c.deferred.empty() && room()) {
      if (!Execute(w, c, c.deferred.front())) break;
      c.deferred.pop_front();
    }
    if (w.abandoning) AbandonDeferred(w, c);
    while (c.deferred.empty() && room()) {
      auto wire = c.requests->TryPop();
      if (!wire.has_value()) break;
      ++w.handled_this_drain;
      w.requests.fetch_add(1, std::memory_order_relaxed);
      auto req = ipc::DecodeRequest(*wire);
      if (!req.ok()) {
        ResponseRecord r;
        r.status = ErrorCode::kParseError;
        r.fd = c.fd;
        RespondFromWorker(w, c, r);
        continue;
      }
      HandleRequest(w, c, *req);
      if (w.abandoning) AbandonDeferred(w, c);
    }
    deferred += c.deferred.size();
  }
  w.rr = n == 0 ? 0 : (w.rr + 1) % n;
  FlushBatches(w);
  FlushNotes(w);
  w.deferred_count.store(deferred, std::memory_order_release);
  if (w.posted_this_drain > 0 || !w.notes->empty()) poller_bell_->Signal();
  return w.posted_this_drain;
}

Daemon::Batch& Daemon::BatchFor(Worker& w, verbs::QpId qp) {
  Batch& b = w.batches[qp];
  if (!b.active) {
    b.active = true;
    const size_t depth = fabric_.SendQueueDepth(qp);
    const size_t max = fabric_.config().max_send_wr;
    b.room = depth >= max ? 0 : max - depth;
  }
  return b;
}

void Daemon::HandleRequest(Worker& w, Connection& c, const RequestRecord& req) {
  if (config_.before_request) config_.before_request(w.index);
  w.load.AddBusy(fabric_.now_ns(), config_.worker_request_ns);
  load_->per_worker[w.index].store(w.load.load(), std::memory_order_relaxed);

  if (req.fd != c.fd || req.seq <= c.last_seq) {
    RespondFromWorker(w, c, Answer(req, c.fd, ErrorCode::kInvalidArgument));
    return;
  }
  c.last_seq = req.seq;
  switch (req.op) {
    case RequestOp::kConnect:
      // The connection already exists by the time its ring does; CONNECT
      // on a data ring only confirms it.
      RespondFromWorker(w, c, Answer(req, c.fd,
                                     c.closing ? ErrorCode::kBadFd
                                               : ErrorCode::kOk));
      return;
    case RequestOp::kRecvReady: {
      if (req.region == pool_mr_.id) {
        const uint64_t rel = req.offset - kSendHeadroom;
        if (req.offset < kSendHeadroom || rel % slot_bytes_ != 0 ||
            rel / slot_bytes_ >= slot_holder_.size()) {
          RespondFromWorker(w, c,
                            Answer(req, c.fd, ErrorCode::kInvalidArgument));
          return;
        }
        Note note;
        note.kind = Note::Kind::kReleaseSlot;
        note.conn = &c;
        note.response = Answer(req, c.fd, ErrorCode::kOk);
        note.slot = static_cast<uint32_t>(rel / slot_bytes_);
        if (!w.pending_notes.empty() || !w.notes->TryPush(note)) {
          w.pending_notes.push_back(note);
        }
        return;
      }
      if (req.region == c.window.id) {
        PostCredit(w, c);
        RespondFromWorker(w, c, Answer(req, c.fd, ErrorCode::kOk));
        return;
      }
      RespondFromWorker(w, c, Answer(req, c.fd, ErrorCode::kBadMr));
      return;
    }
    case RequestOp::kClose:
    case RequestOp::kSend:
      if (c.closing) {
        RespondFromWorker(w, c, Answer(req, c.fd, ErrorCode::kBadFd));
        return;
      }
      if (req.op == RequestOp::kClose) c.closing = true;
      if (!c.deferred.empty() || !Execute(w, c, req)) c.deferred.push_back(req);
      return;
  }
  RespondFromWorker(w, c, Answer(req, c.fd, ErrorCode::kInvalidArgument));
}

bool Daemon::Execute(Worker& w, Connection& c, const RequestRecord& req) {
  Batch& b = BatchFor(w, c.qp);
  if (b.wrs.size() + 2 > b.room) return false;
  const uint32_t seq = WireSeq(req.seq);
  auto fail = [&](ErrorCode code) {
    RespondFromWorker(w, c, Answer(req, c.fd, code));
    return true;
  };

  if (req.op == RequestOp::kClose) {
    WriteHeader(c.control_bytes.data() + kFinSlot,
                static_cast<uint32_t>(MsgType::kFin), 0);
    auto wr = EncodeWr(c.vqpn, seq, TransportMode::kRC, Verb::kSend,
                       LocalSlice{c.control.id, kFinSlot, kSendHeadroom});
    c.inflight->TryPush(Inflight{req.seq, seq, 0, 0,
                                 static_cast<uint8_t>(RequestOp::kClose)});
    AddToBatch(w, c, *wr, &req, false, false);
    return true;
  }

  const Flags flags = Flags(req.flags).Or(c.default_flags);
  const LoadStats local{load_->Mean(), 0};
  const LoadStats remote{c.peer_load ? c.peer_load->Mean() : 0.0, 0};
  auto path = SelectPath(req.length, flags, local, remote, config_.policy);
  if (!path.ok()) return fail(path.code());
  if (req.length == 0) return fail(ErrorCode::kInvalidArgument);
  if (path->mode != TransportMode::kRC) {
    // Datagram transport is available in the verbs layer only.
    return fail(ErrorCode::kInvalidArgument);
  }
  auto mr = fabric_.GetMr(req.region);
  if (!mr.ok() || mr->node != node_ || req.offset > mr->length ||
      req.length > mr->length - req.offset) {
    return fail(ErrorCode::kBadLkey);
  }
  const uint32_t path_flags = Flags::Of(path->mode, path->verb).bits();
  const Inflight entry{req.seq, seq, req.length, path_flags,
                       static_cast<uint8_t>(RequestOp::kSend)};
  const LocalSlice payload{req.region, req.offset, req.length};

  switch (path->verb) {
    case Verb::kSend: {
      if (req.length > c.peer_slot_payload) return fail(ErrorCode::kMsgTooLarge);
      if (req.offset < kSendHeadroom) return fail(ErrorCode::kInvalidArgument);
      auto bytes = fabric_.MrBytes(req.region);
      if (!bytes.ok()) return fail(ErrorCode::kBadLkey);
      WriteHeader(bytes->data() + req.offset - kSendHeadroom,
                  static_cast<uint32_t>(MsgType::kData), req.length);
      auto wr = EncodeWr(c.vqpn, seq, TransportMode::kRC, Verb::kSend,
                         LocalSlice{req.region, req.offset - kSendHeadroom,
                                    req.length + kSendHeadroom});
      c.inflight->TryPush(entry);
      AddToBatch(w, c, *wr, &req, false, false);
      return true;
    }
    case Verb::kWrite: {
      if (req.length > c.peer_window_len) return fail(ErrorCode::kMsgTooLarge);
      if (!c.window_credit) return false;
      c.window_credit = false;
      auto data = EncodeWr(c.vqpn, seq, TransportMode::kRC, Verb::kWrite,
                           payload, RemoteSlice{c.peer_window_rkey, 0});
      data->signaled = false;
      WriteHeader(c.control_bytes.data() + kNotifySlot,
                  static_cast<uint32_t>(MsgType::kNotify), req.length);
      auto notify = EncodeWr(c.vqpn, seq, TransportMode::kRC, Verb::kSend,
                             LocalSlice{c.control.id, kNotifySlot, kSendHeadroom});
      c.inflight->TryPush(entry);
      AddToBatch(w, c, *data, nullptr, true, false);
      AddToBatch(w, c, *notify, &req, true, false);
      return true;
    }
    case Verb::kRead: {
      if (req.length > c.peer_window_len) return fail(ErrorCode::kMsgTooLarge);
      auto wr = EncodeWr(c.vqpn, seq, TransportMode::kRC, Verb::kRead, payload,
                         RemoteSlice{c.peer_window_rkey, 0});
      c.inflight->TryPush(entry);
      AddToBatch(w, c, *wr, &req, false, false);
      return true;
    }
    case Verb::kRecv:
      break;
  }
  return fail(ErrorCode::kIllegalVerb);
}

void Daemon::PostCredit(Worker& w, Connection& c) {
  Batch& b = BatchFor(w, c.qp);
  if (b.wrs.size() + 1 > b.room) {
    c.owe_credit = true;
    return;
  }
  c.owe_credit = false;
  WriteHeader(c.control_bytes.data() + kCreditSlot,
              static_cast<uint32_t>(MsgType::kCredit), 0);
  auto wr = EncodeWr(c.vqpn, kInternalSeq, TransportMode::kRC, Verb::kSend,
                     LocalSlice{c.control.id, kCreditSlot, kSendHeadroom});
  wr->signaled = false;
  AddToBatch(w, c, *wr, nullptr, false, true);
}

void Daemon::AddToBatch(Worker& w, Connection& c, const WorkRequest& wr,
                        const RequestRecord* request, bool write_part,
                        bool credit) {
  Batch& b = BatchFor(w, c.qp);
  b.wrs.push_back(wr);
  Batch::WrMeta meta;
  meta.conn = &c;
  if (request != nullptr) meta.request = *request;
  meta.write_part = write_part;
  meta.credit = credit;
  b.meta.push_back(meta);
}

void Daemon::FlushBatches(Worker& w) {
  for (auto& [qp, b] : w.batches) {
    if (!b.active) continue;
    b.active = false;
    if (b.wrs.empty()) continue;
    const verbs::BatchResult res = fabric_.PostBatch(qp, b.wrs);
    w.posted_this_drain += res.accepted;
    if (res.accepted > 0) b.meta.front().conn->peer_bell->Signal();
    w.posted_wrs.fetch_add(res.accepted, std::memory_order_relaxed);
    if (res.accepted > 0) w.batch_count.fetch_add(1, std::memory_order_relaxed);
    for (size_t i = res.accepted; i < b.wrs.size(); ++i) {
      Batch::WrMeta& m = b.meta[i];
      w.rejected.fetch_add(1, std::memory_order_relaxed);
      if (m.credit) m.conn->owe_credit = true;
      if (m.write_part) m.conn->window_credit = true;
      if (m.request.has_value()) {
        RespondFromWorker(w, *m.conn,
                          Answer(*m.request, m.conn->fd, res.error.code()));
      }
    }
    b.wrs.clear();
    b.meta.clear();
  }
}

void Daemon::RespondFromWorker(Worker& w, Connection& c, ResponseRecord rec) {
  Note note;
  note.kind = Note::Kind::kRespond;
  note.conn = &c;
  note.response = rec;
  if (!w.pending_notes.empty() || !w.notes->TryPush(note)) {
    w.pending_notes.push_back(note);
  }
}

void Daemon::FlushNotes(Worker& w) {
  while (!w.pending_notes.empty() && w.notes->TryPush(w.pending_notes.front())) {
    w.pending_notes.pop_front();
  }
}

// ---------------------------------------------------------------------------
// Poller

size_t Daemon::PollerPoll() {
  const uint64_t before = responses_.load(std::memory_order_relaxed);
  for (auto& w : workers_) {
    while (auto note = w->notes->TryPop()) {
      Connection& c = *note->conn;
      if (note->kind == Note::Kind::kReleaseSlot) {
        if (slot_holder_[note->slot] == c.vqpn) {
          slot_holder_[note->slot] = 0;
          held_slot_count_.fetch_sub(1, std::memory_order_relaxed);
          ReleaseSlot(note->slot);
        } else {
          note->response.status = ErrorCode::kInvalidArgument;
        }
      }
      Deliver(c, note->response);
    }
  }
  RetryOverflow();
  if (reclaim_pending_.exchange(false)) ReclaimReleased();
  for (int round = 0; round < 16; ++round) {
    const auto cqes = fabric_.PollCq(cq_, 256);
    if (cqes.empty()) break;
    for (const auto& cqe : cqes) {
      if (cqe.side == CompletionSide::kRecv) {
        HandleRecvCompletion(cqe);
      } else {
        HandleSendCompletion(cqe);
      }
    }
  }
  RefillSrq();
  for (auto& w : workers_) {
    bool pushed = false;
    while (!w->pending_credits.empty() &&
           w->credits->TryPush(w->pending_credits.front())) {
      w->pending_credits.pop_front();
      pushed = true;
    }
    if (pushed) w->doorbell.Signal();
  }
  MaybeEmitMetrics();
  return responses_.load(std::memory_order_relaxed) - before;
}

void Daemon::HandleSendCompletion(const CompletionEntry& cqe) {
  const WrTag tag = UnpackWrId(cqe.wr_id);
  if (tag.seq == kInternalSeq) return;  // a credit; only the peer cares
  Connection* c = demux_.Get(tag.vqpn);
  if (c == nullptr) {
    unknown_vqpn_.fetch_add(1, std::memory_order_relaxed);
    return;
  }
  const ErrorCode code = CodeOf(cqe.status);
  if (cqe.verb == Verb::kWrite && code != ErrorCode::kOk) {
    // The unsignaled half of a WRITE; its notify answers the request.
    c->failed_write = std::make_pair(tag.seq, code);
    return;
  }
  // Entries ahead of the match belong to posts the NIC rejected; the
  // worker has already answered those.
  std::optional<Inflight> entry;
  while (auto e = c->inflight->TryPop()) {
    if (e->wire_seq == tag.seq) {
      entry = *e;
      break;
    }
  }
  if (!entry.has_value()) return;
  ErrorCode status = code;
  if (c->failed_write.has_value() && c->failed_write->first == tag.seq) {
    if (status == ErrorCode::kOk) status = c->failed_write->second;
    c->failed_write.reset();
  }
  ResponseRecord r;
  r.op = entry->op;
  r.status = status;
  r.fd = c->fd;
  r.length = status == ErrorCode::kOk ? entry->length : 0;
  r.flags = entry->flags;
  r.seq = entry->seq;
  if (entry->op == static_cast<uint8_t>(RequestOp::kClose)) {
    c->open = false;
  } else if (status == ErrorCode::kOk) {
    completed_msgs_.fetch_add(1, std::memory_order_relaxed);
    completed_bytes_.fetch_add(entry->length, std::memory_order_relaxed);
  }
  Deliver(*c, r);
}

void Daemon::HandleRecvCompletion(const CompletionEntry& cqe) {
  const auto slot = static_cast<uint32_t>(cqe.wr_id);
  if (cqe.status != CompletionStatus::kSuccess) {
    ReleaseSlot(slot);
    return;
  }
  const auto vqpn = VqpnOfCompletion(cqe);
  Connection* c = vqpn.has_value() ? demux_.Get(*vqpn) : nullptr;
  if (c == nullptr) {
    unknown_vqpn_.fetch_add(1, std::memory_order_relaxed);
    ReleaseSlot(slot);
    return;
  }
  uint32_t type = 0;
  uint64_t length = 0;
  ReadHeader(pool_bytes_.data() + uint64_t{slot} * slot_bytes_, type, length);

  ResponseRecord r;
  r.op = ipc::kInboundDataOp;
  r.fd = c->fd;
  switch (static_cast<MsgType>(type)) {
    case MsgType::kData:
      if (!c->open || length + kSendHeadroom != cqe.byte_count) {
        ReleaseSlot(slot);
        return;
      }
      inbound_msgs_.fetch_add(1, std::memory_order_relaxed);
      slot_holder_[slot] = c->vqpn;
      held_slot_count_.fetch_add(1, std::memory_order_relaxed);
      r.region = pool_mr_.id;
      r.offset = uint64_t{slot} * slot_bytes_ + kSendHeadroom;
      r.length = length;
      r.flags = Flags::Of(TransportMode::kRC, Verb::kSend).bits();
      r.seq = ++c->inbound_seq;
      Deliver(*c, r);
      return;
    case MsgType::kNotify:
      ReleaseSlot(slot);
      if (!c->open) return;
      inbound_msgs_.fetch_add(1, std::memory_order_relaxed);
      r.region = c->window.id;
      r.offset = 0;
      r.length = length;
      r.flags = Flags::Of(TransportMode::kRC, Verb::kWrite).bits();
      r.seq = ++c->inbound_seq;
      Deliver(*c, r);
      return;
    case MsgType::kCredit: {
      ReleaseSlot(slot);
      Worker& w = *workers_[c->worker];
      if (!w.pending_credits.empty() || !w.credits->TryPush(c)) {
        w.pending_credits.push_back(c);
      }
      w.doorbell.Signal();
      return;
    }
    case MsgType::kFin:
      ReleaseSlot(slot);
      r.op = ipc::kPeerClosedOp;
      r.seq = ++c->inbound_seq;
      Deliver(*c, r);
      return;
  }
  ReleaseSlot(slot);
}

void Daemon::ReclaimReleased() {
  std::vector<std::shared_ptr<VqpnLease>> leases;
  {
    std::lock_guard lock(reclaim_mu_);
    leases.swap(reclaim_);
  }
  for (const auto& lease : leases) {
    if (!lease) continue;
    for (uint32_t slot = 0; slot < slot_holder_.size(); ++slot) {
      if (slot_holder_[slot] != lease->vqpn) continue;
      slot_holder_[slot] = 0;
      held_slot_count_.fetch_sub(1, std::memory_order_relaxed);
      ReleaseSlot(slot);
    }
  }
}

void Daemon::Deliver(Connection& c, const ResponseRecord& rec) {
  if (c.released) {
    if (rec.region == pool_mr_.id && rec.op == ipc::kInboundDataOp) {
      const auto slot =
          static_cast<uint32_t>((rec.offset - kSendHeadroom) / slot_bytes_);
      slot_holder_[slot] = 0;
      held_slot_count_.fetch_sub(1, std::memory_order_relaxed);
      ReleaseSlot(slot);
    }
    return;
  }
  if (c.overflow.empty() && c.responses->TryPush(ipc::Encode(rec))) {
    responses_.fetch_add(1, std::memory_order_relaxed);
    c.events.Signal();
    return;
  }
  c.overflow.push_back(rec);
  if (!c.in_overflow_list) {
    c.in_overflow_list = true;
    overflow_.push_back(&c);
  }
}

void Daemon::RetryOverflow() {
  std::erase_if(overflow_, [this](Connection* c) {
    bool pushed = false;
    while (!c->overflow.empty() &&
           c->responses->TryPush(ipc::Encode(c->overflow.front()))) {
      c->overflow.pop_front();
      responses_.fetch_add(1, std::memory_order_relaxed);
      pushed = true;
    }
    if (pushed) c->events.Signal();
    if (c->overflow.empty() || c->released) {
      c->in_overflow_list = false;
      return true;
    }
    return false;
  });
}

void Daemon::ReleaseSlot(uint32_t slot) {
  free_slots_.push_back(slot);
  free_slot_count_.store(free_slots_.size(), std::memory_order_relaxed);
}

void Daemon::RefillSrq() {
  size_t depth = fabric_.SrqDepth(srq_);
  if (depth >= config_.srq_low_watermark) return;
  while (depth < config_.srq_depth && !free_slots_.empty()) {
    const uint32_t slot = free_slots_.back();
    WorkRequest wr;
    wr.wr_id = slot;
    wr.verb = Verb::kRecv;
    wr.local = {pool_mr_.id, uint64_t{slot} * slot_bytes_, slot_bytes_};
    if (!fabric_.PostSrqRecv(srq_, wr).ok()) break;
    free_slots_.pop_back();
    ++depth;
  }
  free_slot_count_.store(free_slots_.size(), std::memory_order_relaxed);
}

}  // namespace raas
