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

#include "raas/bench/locked_qp.h"

#include <algorithm>

namespace raas::bench {

LockedQpAdapter::LockedQpAdapter(uint32_t threads, uint32_t q,
                                 uint64_t hold_ns, uint64_t penalty_ns)
    : q_(std::max<uint32_t>(q, 1)), hold_ns_(hold_ns), penalty_ns_(penalty_ns) {
  const uint32_t qps = (std::max<uint32_t>(threads, 1) + q_ - 1) / q_;
  for (uint32_t i = 0; i < qps; ++i) locks_.push_back(std::make_unique<Lock>());
}

uint64_t LockedQpAdapter::Post(uint32_t thread, uint64_t now_ns,
                               const PostFn& post) {
  const size_t qp = QpOf(thread);
  Lock& lock = *locks_[qp];
  std::unique_lock guard(lock.mu, std::try_to_lock);
  if (!guard.owns_lock()) {
    blocked_.fetch_add(1, std::memory_order_relaxed);
    guard.lock();
  }
  acquisitions_.fetch_add(1, std::memory_order_relaxed);
  uint64_t start = now_ns;
  if (lock.free_at_ns > now_ns) {
    contended_.fetch_add(1, std::memory_order_relaxed);
    start = lock.free_at_ns + penalty_ns_;
  }
  const uint64_t issue = start + hold_ns_;
  lock.free_at_ns = issue;
  post(qp, issue);
  return issue;
}

}  // namespace raas::bench
