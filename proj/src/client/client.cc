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

#include "raas/client/client.h"

#include <algorithm>
#include <cstring>
#include <thread>

namespace raas {

using ipc::RequestOp;
using ipc::RequestRecord;
using ipc::ResponseRecord;

namespace {

constexpr auto kWaitSlice = std::chrono::milliseconds(10);
// How long a request may stay unanswered after the daemon side went away.
constexpr int kGoneWaitSlices = 50;

}  // namespace

struct Client::FdState {
  FdEndpoint ep;
  uint64_t next_seq = 1;
  bool nonblocking = false;
  verbs::MemoryRegion staging;
  std::span<std::byte> staging_bytes;
  std::deque<ResponseRecord> inbound;
  uint64_t consumed = 0;  // bytes of inbound.front() already returned
  bool peer_closed = false;
  std::map<uint64_t, ResponseRecord> answers;
  std::optional<uint64_t> pending_send;
  std::optional<verbs::MrId> pending_mr;
  Status sticky;
  std::optional<Flags> last_path;
};

Client::Client(Daemon& daemon)
    : daemon_(daemon), fabric_(daemon.fabric()), app_(daemon.RegisterApp()) {}

Client::~Client() = default;

Client::FdState* Client::Lookup(int fd) const {
  if (fd < 0) return nullptr;
  return fds_.Get(static_cast<uint32_t>(fd));
}

Result<int> Client::Adopt(const FdEndpoint& endpoint) {
  auto state = std::make_unique<FdState>();
  state->ep = endpoint;
  const uint64_t staging =
      kSendHeadroom + daemon_.config().policy.copy_register_crossover;
  auto mr = daemon_.RegisterAppMemory(app_, staging);
  RAAS_RETURN_IF_ERROR(mr.status());
  state->staging = *mr;
  state->staging_bytes = *fabric_.MrBytes(mr->id);
  std::lock_guard lock(mu_);
  fds_.Set(endpoint.fd, state.get());
  owned_.push_back(std::move(state));
  return static_cast<int>(endpoint.fd);
}

Result<int> Client::Connect(const Addr& addr, Flags flags) {
  auto ep = daemon_.Connect(app_, addr, flags);
  RAAS_RETURN_IF_ERROR(ep.status());
  return Adopt(*ep);
}

Result<int> Client::Listen(const Addr& addr) {
  auto fd = daemon_.Listen(app_, addr);
  RAAS_RETURN_IF_ERROR(fd.status());
  std::lock_guard lock(mu_);
  listeners_.insert(static_cast<int>(*fd));
  return static_cast<int>(*fd);
}

Result<int> Client::Accept(int listen_fd,
                           std::optional<std::chrono::milliseconds> timeout) {
  {
    std::lock_guard lock(mu_);
    if (!listeners_.contains(listen_fd)) {
      return Status(ErrorCode::kBadFd, "not a listening fd");
    }
  }
  auto ep = daemon_.Accept(app_, static_cast<uint32_t>(listen_fd), timeout);
  RAAS_RETURN_IF_ERROR(ep.status());
  return Adopt(*ep);
}

Status Client::Push(FdState& s, const RequestRecord& req) {
  const ipc::WireRecord wire = ipc::Encode(req);
  while (!s.ep.requests->TryPush(wire)) {
    if (s.nonblocking) return Status(ErrorCode::kWouldBlock, "request ring full");
    Reap(s);
    s.ep.doorbell->Signal();
    std::this_thread::yield();
  }
  s.ep.doorbell->Signal();
  return Status::Ok();
}

void Client::Reap(FdState& s) {
  while (auto wire = s.ep.responses->TryPop()) {
    auto rec = ipc::DecodeResponse(*wire);
    if (!rec.ok()) continue;
    switch (rec->op) {
      case ipc::kInboundDataOp:
        s.inbound.push_back(*rec);
        break;
      case ipc::kPeerClosedOp:
        s.peer_closed = true;
        break;
      case static_cast<uint8_t>(RequestOp::kRecvReady):
        break;
      default:
        s.answers[rec->seq] = *rec;
    }
  }
}

Result<ResponseRecord> Client::WaitFor(FdState& s, uint64_t seq) {
  int gone_slices = 0;
  for (;;) {
    Reap(s);
    auto it = s.answers.find(seq);
    if (it != s.answers.end()) {
      ResponseRecord rec = it->second;
      s.answers.erase(it);
      return rec;
    }
    if (s.ep.peer_gone->load() && ++gone_slices > kGoneWaitSlices) {
      return Status(ErrorCode::kPeerClosed, "daemon side went away");
    }
    (void)s.ep.events->Wait(kWaitSlice);
  }
}

Status Client::FinishPendingSend(FdState& s, bool wait) {
  if (!s.pending_send.has_value()) return Status::Ok();
  Reap(s);
  ResponseRecord rec;
  auto it = s.answers.find(*s.pending_send);
  if (it != s.answers.end()) {
    rec = it->second;
    s.answers.erase(it);
  } else if (!wait) {
    return Status(ErrorCode::kWouldBlock, "previous send in flight");
  } else {
    auto r = WaitFor(s, *s.pending_send);
    if (!r.ok()) {
      s.pending_send.reset();
      return r.status();
    }
    rec = *r;
  }
  s.pending_send.reset();
  if (s.pending_mr.has_value()) {
    (void)daemon_.DeregisterAppMemory(app_, *s.pending_mr);
    s.pending_mr.reset();
  }
  if (rec.status != ErrorCode::kOk) {
    s.sticky = Status(rec.status, "earlier non-blocking send failed");
  } else {
    s.last_path = Flags(rec.flags);
  }
  return Status::Ok();
}

Result<uint64_t> Client::Send(int fd, std::span<const std::byte> data,
                              Flags flags) {
  FdState* s = Lookup(fd);
  if (s == nullptr) return Status(ErrorCode::kBadFd, "unknown fd");
  if (data.empty()) return Status(ErrorCode::kInvalidArgument, "empty send");
  RAAS_RETURN_IF_ERROR(flags.Validate());
  RAAS_RETURN_IF_ERROR(FinishPendingSend(*s, !s->nonblocking));
  if (!s->sticky.ok()) return std::exchange(s->sticky, Status::Ok());

  RequestRecord req;
  req.op = RequestOp::kSend;
  req.fd = s->ep.fd;
  req.offset = kSendHeadroom;
  req.length = data.size();
  req.flags = flags.bits();
  std::optional<verbs::MrId> temp;
  if (CopyOrRegister(data.size(), daemon_.config().policy) ==
      BufferStrategy::kMemcpy) {
    std::memcpy(s->staging_bytes.data() + kSendHeadroom, data.data(),
                data.size());
    req.region = s->staging.id;
  } else {
    auto mr = daemon_.RegisterAppMemory(app_, kSendHeadroom + data.size());
    RAAS_RETURN_IF_ERROR(mr.status());
    auto bytes = *fabric_.MrBytes(mr->id);
    std::memcpy(bytes.data() + kSendHeadroom, data.data(), data.size());
    req.region = mr->id;
    temp = mr->id;
  }
  req.seq = s->next_seq++;
  if (Status st = Push(*s, req); !st.ok()) {
    if (temp) (void)daemon_.DeregisterAppMemory(app_, *temp);
    return st;
  }
  if (s->nonblocking) {
    s->pending_send = req.seq;
    s->pending_mr = temp;
    return data.size();
  }
  auto rec = WaitFor(*s, req.seq);
  if (temp) (void)daemon_.DeregisterAppMemory(app_, *temp);
  RAAS_RETURN_IF_ERROR(rec.status());
  if (rec->status != ErrorCode::kOk) return Status(rec->status, "send failed");
  s->last_path = Flags(rec->flags);
  return data.size();
}

Status Client::AwaitInbound(FdState& s) {
  int gone_slices = 0;
  for (;;) {
    Reap(s);
    if (!s.inbound.empty() || s.peer_closed) return Status::Ok();
    if (s.nonblocking) return Status(ErrorCode::kWouldBlock, "no data");
    if (s.ep.peer_gone->load() && ++gone_slices > 1) {
      s.peer_closed = true;
      return Status::Ok();
    }
    (void)s.ep.events->Wait(kWaitSlice);
  }
}

Status Client::Ack(FdState& s, const ResponseRecord& rec) {
  RequestRecord req;
  req.op = RequestOp::kRecvReady;
  req.fd = s.ep.fd;
  req.region = rec.region;
  req.offset = rec.offset;
  req.length = rec.length;
  req.seq = s.next_seq++;
  const bool nonblocking = s.nonblocking;
  s.nonblocking = false;  // an ack must not be dropped
  Status st = Push(s, req);
  s.nonblocking = nonblocking;
  return st;
}

Result<uint64_t> Client::Recv(int fd, std::span<std::byte> out) {
  FdState* s = Lookup(fd);
  if (s == nullptr) return Status(ErrorCode::kBadFd, "unknown fd");
  RAAS_RETURN_IF_ERROR(AwaitInbound(*s));
  if (s->inbound.empty()) return uint64_t{0};
  const ResponseRecord rec = s->inbound.front();
  const uint64_t n = std::min<uint64_t>(out.size(), rec.length - s->consumed);
  auto bytes = fabric_.MrBytes(rec.region);
  RAAS_RETURN_IF_ERROR(bytes.status());
  std::memcpy(out.data(), bytes->data() + rec.offset + s->consumed, n);
  s->consumed += n;
  if (s->consumed == rec.length) {
    s->inbound.pop_front();
    s->consumed = 0;
    RAAS_RETURN_IF_ERROR(Ack(*s, rec));
  }
  return n;
}

Result<ZeroCopyPlacement> Client::RecvZeroCopy(int fd,
                                               const verbs::MemoryRegion& mr) {
  FdState* s = Lookup(fd);
  if (s == nullptr) return Status(ErrorCode::kBadFd, "unknown fd");
  if (!daemon_.OwnsMemory(app_, mr.id)) {
    return Status(ErrorCode::kBadMr, "region not owned by this application");
  }
  RAAS_RETURN_IF_ERROR(AwaitInbound(*s));
  if (s->inbound.empty()) return ZeroCopyPlacement{0, 0};
  const ResponseRecord rec = s->inbound.front();
  const uint64_t left = rec.length - s->consumed;
  if (left > mr.length) {
    return Status(ErrorCode::kMrTooSmall, "message larger than region");
  }
  auto src = fabric_.MrBytes(rec.region);
  auto dst = fabric_.MrBytes(mr.id);
  RAAS_RETURN_IF_ERROR(src.status());
  RAAS_RETURN_IF_ERROR(dst.status());
  std::memcpy(dst->data(), src->data() + rec.offset + s->consumed, left);
  s->inbound.pop_front();
  s->consumed = 0;
  RAAS_RETURN_IF_ERROR(Ack(*s, rec));
  return ZeroCopyPlacement{0, left};
}

Status Client::Close(int fd) {
  FdState* s = Lookup(fd);
  if (s == nullptr) {
    std::lock_guard lock(mu_);
    if (listeners_.erase(fd) > 0) {
      return daemon_.CloseListener(app_, static_cast<uint32_t>(fd));
    }
    return Status(ErrorCode::kBadFd, "unknown fd");
  }
  s->nonblocking = false;
  (void)FinishPendingSend(*s, true);
  Reap(*s);
  for (const ResponseRecord& rec : s->inbound) (void)Ack(*s, rec);
  s->inbound.clear();
  RequestRecord req;
  req.op = RequestOp::kClose;
  req.fd = s->ep.fd;
  req.seq = s->next_seq++;
  Status result = Push(*s, req);
  if (result.ok()) {
    auto rec = WaitFor(*s, req.seq);
    if (rec.ok() && rec->status != ErrorCode::kOk) {
      result = Status(rec->status, "close failed");
    }
  }
  (void)daemon_.DeregisterAppMemory(app_, s->staging.id);
  (void)daemon_.ReleaseFd(app_, s->ep.fd);
  std::lock_guard lock(mu_);
  fds_.Set(s->ep.fd, nullptr);
  return result;
}

Status Client::SetNonBlocking(int fd, bool enabled) {
  FdState* s = Lookup(fd);
  if (s == nullptr) return Status(ErrorCode::kBadFd, "unknown fd");
  s->nonblocking = enabled;
  return Status::Ok();
}

Result<verbs::MemoryRegion> Client::RegisterMemory(uint64_t length) {
  return daemon_.RegisterAppMemory(app_, length);
}

Status Client::DeregisterMemory(verbs::MrId mr) {
  return daemon_.DeregisterAppMemory(app_, mr);
}

std::optional<Flags> Client::LastSendPath(int fd) const {
  const FdState* s = Lookup(fd);
  if (s == nullptr) return std::nullopt;
  return s->last_path;
}

std::optional<uint32_t> Client::VqpnOf(int fd) const {
  const FdState* s = Lookup(fd);
  if (s == nullptr) return std::nullopt;
  return s->ep.vqpn;
}

}  // namespace raas
