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

#ifndef RAAS_IPC_EVENT_CHANNEL_H_
#define RAAS_IPC_EVENT_CHANNEL_H_

#include <chrono>
#include <cstdint>

#include "raas/common/status.h"

namespace raas::ipc {

// Counting wakeup channel over a Linux eventfd in semaphore mode: every
// Signal() adds one, every successful Wait() takes one. Any number of
// threads may signal; one thread waits.
class EventChannel {
 public:
  static Result<EventChannel> Create();

  // An unopened channel; Signal() does nothing and Wait() fails with
  // BAD_FD until a created channel is moved in.
  EventChannel() = default;

  EventChannel(EventChannel&& other) noexcept;
  EventChannel& operator=(EventChannel&& other) noexcept;
  EventChannel(const EventChannel&) = delete;
  EventChannel& operator=(const EventChannel&) = delete;
  ~EventChannel();

  void Signal();
  // Consumes one signal, waiting up to `timeout` for one to arrive.
  // Returns kTimeout if none did.
  Status Wait(std::chrono::microseconds timeout);

  int fd() const { return fd_; }

 private:
  explicit EventChannel(int fd) : fd_(fd) {}
  int fd_ = -1;
};

}  // namespace raas::ipc

#endif  // RAAS_IPC_EVENT_CHANNEL_H_
