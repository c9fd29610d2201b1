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

#ifndef RAAS_DAEMON_LOAD_TRACKER_H_
#define RAAS_DAEMON_LOAD_TRACKER_H_

#include <cstdint>

namespace raas {

// Busy-fraction EWMA over fixed windows of simulated time. Each closed
// window contributes min(1, busy / window); idle windows decay the value.
class LoadTracker {
 public:
  static constexpr uint64_t kDefaultWindowNs = 10'000'000;
  static constexpr double kDefaultAlpha = 0.2;

  explicit LoadTracker(uint64_t window_ns = kDefaultWindowNs,
                       double alpha = kDefaultAlpha)
      : window_ns_(window_ns), alpha_(alpha) {}

  // Charges `busy_ns` of work that happened at `now_ns`.
  void AddBusy(uint64_t now_ns, uint64_t busy_ns);
  // Closes every window ending at or before `now_ns`.
  void AdvanceTo(uint64_t now_ns);

  double load() const { return load_; }
  uint64_t window_ns() const { return window_ns_; }

 private:
  uint64_t window_ns_;
  double alpha_;
  uint64_t window_start_ = 0;
  uint64_t busy_ = 0;
  double load_ = 0.0;
};

}  // namespace raas

#endif  // RAAS_DAEMON_LOAD_TRACKER_H_
