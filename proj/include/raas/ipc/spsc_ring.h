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

#ifndef RAAS_IPC_SPSC_RING_H_
#define RAAS_IPC_SPSC_RING_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <new>
#include <optional>
#include <type_traits>

#include "raas/common/status.h"

namespace raas::ipc {

// Bounded lock-free single-producer/single-consumer ring.
//
// One slot is kept empty to tell full from empty, so a ring created with
// capacity N holds at most N - 1 records. `head_` is written only by the
// consumer and `tail_` only by the producer; each side publishes with a
// release store and observes the other with an acquire load. Neither side
// ever waits on the other.
template <typename T>
class SpscRing {
  static_assert(std::is_trivially_copyable_v<T>,
                "ring slots hold plain records");

 public:
  static Result<std::unique_ptr<SpscRing>> Create(size_t capacity) {
    if (capacity < 2 || (capacity & (capacity - 1)) != 0) {
      return Status(ErrorCode::kBadCapacity,
                    "capacity must be a power of two >= 2");
    }
    return std::unique_ptr<SpscRing>(new SpscRing(capacity));
  }

  SpscRing(const SpscRing&) = delete;
  SpscRing& operator=(const SpscRing&) = delete;

  // Producer side. Returns false, leaving the ring untouched, when full.
  bool TryPush(const T& record) {
    const uint64_t tail = tail_.load(std::memory_order_relaxed);
    if (tail - cached_head_ >= mask_) {
      cached_head_ = head_.load(std::memory_order_acquire);
      if (tail - cached_head_ >= mask_) return false;
    }
    slots_[tail & mask_] = record;
    tail_.store(tail + 1, std::memory_order_release);
    return true;
  }

  // Consumer side. Returns nullopt when empty.
  std::optional<T> TryPop() {
    const uint64_t head = head_.load(std::memory_order_relaxed);
    if (head == cached_tail_) {
      cached_tail_ = tail_.load(std::memory_order_acquire);
      if (head == cached_tail_) return std::nullopt;
    }
    T record = slots_[head & mask_];
    head_.store(head + 1, std::memory_order_release);
    return record;
  }

  // Approximate when called concurrently with either side.
  size_t size() const {
    const uint64_t tail = tail_.load(std::memory_order_acquire);
    const uint64_t head = head_.load(std::memory_order_acquire);
    return static_cast<size_t>(tail - head);
  }
  bool empty() const { return size() == 0; }
  size_t capacity() const { return mask_ + 1; }
  size_t usable_capacity() const { return mask_; }

 private:
  explicit SpscRing(size_t capacity)
      : mask_(capacity - 1), slots_(new T[capacity]()) {}

  static constexpr size_t kLine = 64;

  const uint64_t mask_;
  const std::unique_ptr<T[]> slots_;
  alignas(kLine) std::atomic<uint64_t> head_{0};
  uint64_t cached_tail_ = 0;  // consumer-private
  alignas(kLine) std::atomic<uint64_t> tail_{0};
  uint64_t cached_head_ = 0;  // producer-private
};

}  // namespace raas::ipc

#endif  // RAAS_IPC_SPSC_RING_H_
