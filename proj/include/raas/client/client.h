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

#ifndef RAAS_CLIENT_CLIENT_H_
#define RAAS_CLIENT_CLIENT_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "raas/common/status.h"
#include "raas/daemon/addr.h"
#include "raas/daemon/daemon.h"
#include "raas/daemon/flags.h"
#include "raas/daemon/slot_table.h"
#include "raas/ipc/records.h"
#include "raas/verbs/types.h"

namespace raas {

struct ZeroCopyPlacement {
  uint64_t offset = 0;
  uint64_t length = 0;
};

// Socket-like access to the daemon for one application. Distinct fds may be
// used from distinct threads; one fd from one thread at a time.
//
// Messages keep their boundaries: each Send() arrives as one unit, and a
// Recv() shorter than the unit leaves the rest for the next Recv().
class Client {
 public:
  explicit Client(Daemon& daemon);
  ~Client();
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  Result<int> Connect(const Addr& addr, Flags flags = Flags());
  Result<int> Listen(const Addr& addr);
  Result<int> Accept(int listen_fd,
                     std::optional<std::chrono::milliseconds> timeout =
                         std::nullopt);
  Result<uint64_t> Send(int fd, std::span<const std::byte> data,
                        Flags flags = Flags());
  // Returns 0 once the peer has closed and everything it sent was read.
  Result<uint64_t> Recv(int fd, std::span<std::byte> out);
  // Places the next inbound message at offset 0 of `mr`, which must belong
  // to this application.
  Result<ZeroCopyPlacement> RecvZeroCopy(int fd, const verbs::MemoryRegion& mr);
  Status Close(int fd);
  Status SetNonBlocking(int fd, bool enabled);

  Result<verbs::MemoryRegion> RegisterMemory(uint64_t length);
  Status DeregisterMemory(verbs::MrId mr);

  // Transport and verb the daemon used for the last completed Send().
  std::optional<Flags> LastSendPath(int fd) const;
  std::optional<uint32_t> VqpnOf(int fd) const;
  AppId app() const { return app_; }

 private:
  struct FdState;

  FdState* Lookup(int fd) const;
  Result<int> Adopt(const FdEndpoint& endpoint);
  Status Push(FdState& s, const ipc::RequestRecord& req);
  void Reap(FdState& s);
  Result<ipc::ResponseRecord> WaitFor(FdState& s, uint64_t seq);
  Status FinishPendingSend(FdState& s, bool wait);
  // Waits until an inbound message or end of stream is available.
  Status AwaitInbound(FdState& s);
  Status Ack(FdState& s, const ipc::ResponseRecord& rec);

  Daemon& daemon_;
  verbs::Fabric& fabric_;
  const AppId app_;

  mutable std::mutex mu_;  // fd creation and teardown only
  SlotTable<FdState> fds_;
  std::vector<std::unique_ptr<FdState>> owned_;
  std::set<int> listeners_;
};

}  // namespace raas

#endif  // RAAS_CLIENT_CLIENT_H_
