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

#ifndef RAAS_BENCH_LOCKED_QP_H_
#define RAAS_BENCH_LOCKED_QP_H_

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <vector>

namespace raas::bench {

// Baseline where q application threads share one QP and serialize posts on
// a per-QP mutex. Time is logical: a post requested at `now_ns` waits for
// the lock's previous holder, and a contended acquisition also pays the
// lock-handoff penalty. The mutex is real, so threads may call Post
// concurrently.
class LockedQpAdapter {
 public:
  LockedQpAdapter(uint32_t threads, uint32_t q, uint64_t hold_ns,
                  uint64_t penalty_ns);

  size_t qp_count() const { return locks_.size(); }
  size_t QpOf(uint32_t thread) const { return thread / q_; }

  // Runs `post(qp, issue_ns)` under the QP lock and returns `issue_ns`, the
  // logical time the work request leaves the critical section.
  using PostFn = std::function<void(size_t qp, uint64_t issue_ns)>;
  uint64_t Post(uint32_t thread, uint64_t now_ns, const PostFn& post);

  // Acquisitions that found the lock held in logical time.
  uint64_t contended() const { return contended_.load(); }
  uint64_t acquisitions() const { return acquisitions_.load(); }
  // Acquisitions that found the mutex held by another OS thread.
  uint64_t blocked() const { return blocked_.load(); }

 private:
  struct Lock {
    std::mutex mu;
    uint64_t free_at_ns = 0;
  };

  uint32_t q_;
  uint64_t hold_ns_;
  uint64_t penalty_ns_;
  std::vector<std::unique_ptr<Lock>> locks_;
  std::atomic<uint64_t> contended_{0};
  std::atomic<uint64_t> acquisitions_{0};
  std::atomic<uint64_t> blocked_{0};
};

}  // namespace raas::bench

#endif  // RAAS_BENCH_LOCKED_QP_H_
