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

#include "raas/ipc/event_channel.h"

#include <poll.h>
#include <sys/eventfd.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <string>
#include <utility>

namespace raas::ipc {

Result<EventChannel> EventChannel::Create() {
  const int fd = eventfd(0, EFD_SEMAPHORE | EFD_NONBLOCK | EFD_CLOEXEC);
  if (fd < 0) {
    return Status(ErrorCode::kInvalidArgument,
                  std::string("eventfd: ") + std::strerror(errno));
  }
  return EventChannel(fd);
}

EventChannel::EventChannel(EventChannel&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)) {}

EventChannel& EventChannel::operator=(EventChannel&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) close(fd_);
    fd_ = std::exchange(other.fd_, -1);
  }
  return *this;
}

EventChannel::~EventChannel() {
  if (fd_ >= 0) close(fd_);
}

void EventChannel::Signal() {
  if (fd_ < 0) return;
  const uint64_t one = 1;
  while (write(fd_, &one, sizeof(one)) < 0 && errno == EINTR) {
  }
}

Status EventChannel::Wait(std::chrono::microseconds timeout) {
  if (fd_ < 0) return Status(ErrorCode::kBadFd, "channel not open");
  using Clock = std::chrono::steady_clock;
  const auto deadline = Clock::now() + timeout;
  for (;;) {
    uint64_t value = 0;
    if (read(fd_, &value, sizeof(value)) == sizeof(value)) return Status::Ok();
    if (errno != EAGAIN && errno != EINTR) {
      return Status(ErrorCode::kInvalidArgument, std::strerror(errno));
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    if (Clock::now() >= deadline) return Status(ErrorCode::kTimeout);
    pollfd pfd{fd_, POLLIN, 0};
    // Round up so sub-millisecond remainders still block.
    poll(&pfd, 1, static_cast<int>(left.count()) + 1);
  }
}

}  // namespace raas::ipc
