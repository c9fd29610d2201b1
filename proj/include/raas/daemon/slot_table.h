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

#ifndef RAAS_DAEMON_SLOT_TABLE_H_
#define RAAS_DAEMON_SLOT_TABLE_H_

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>

namespace raas {

// Two-level table of atomic pointers indexed by a 32-bit key. Writers must
// be serialized externally; readers never block and see either the old or
// the new pointer. Chunks are allocated on first use and live as long as
// the table.
template <typename T>
class SlotTable {
 public:
  SlotTable() = default;
  ~SlotTable() {
    for (auto& chunk : chunks_) delete chunk.load(std::memory_order_relaxed);
  }
  SlotTable(const SlotTable&) = delete;
  SlotTable& operator=(const SlotTable&) = delete;

  T* Get(uint32_t key) const {
    const Chunk* chunk = chunks_[key >> kChunkBits].load(std::memory_order_acquire);
    if (chunk == nullptr) return nullptr;
    return chunk->slots[key & kChunkMask].load(std::memory_order_acquire);
  }

  void Set(uint32_t key, T* value) {
    auto& top = chunks_[key >> kChunkBits];
    Chunk* chunk = top.load(std::memory_order_relaxed);
    if (chunk == nullptr) {
      chunk = new Chunk();
      top.store(chunk, std::memory_order_release);
    }
    chunk->slots[key & kChunkMask].store(value, std::memory_order_release);
  }

 private:
  static constexpr uint32_t kChunkBits = 16;
  static constexpr uint32_t kChunkMask = (1u << kChunkBits) - 1;
  struct Chunk {
    std::array<std::atomic<T*>, size_t{1} << kChunkBits> slots{};
  };
  std::array<std::atomic<Chunk*>, size_t{1} << (32 - kChunkBits)> chunks_{};
};

// Append-only list published to lock-free readers: a writer stores the
// element, then bumps the size with release ordering.
template <typename T>
class PublishedList {
 public:
  void Append(T* value) {
    const auto n = size_.load(std::memory_order_relaxed);
    table_.Set(static_cast<uint32_t>(n), value);
    size_.store(n + 1, std::memory_order_release);
  }
  size_t size() const { return size_.load(std::memory_order_acquire); }
  T* operator[](size_t i) const { return table_.Get(static_cast<uint32_t>(i)); }

 private:
  SlotTable<T> table_;
  std::atomic<size_t> size_{0};
};

}  // namespace raas

#endif  // RAAS_DAEMON_SLOT_TABLE_H_
