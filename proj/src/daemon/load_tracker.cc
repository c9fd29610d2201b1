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

#include "raas/daemon/load_tracker.h"

#include <algorithm>
#include <cmath>

namespace raas {

void LoadTracker::AdvanceTo(uint64_t now_ns) {
  if (now_ns < window_start_ + window_ns_) return;
  const double frac =
      std::min(1.0, static_cast<double>(busy_) / static_cast<double>(window_ns_));
  load_ = alpha_ * frac + (1.0 - alpha_) * load_;
  busy_ = 0;
  window_start_ += window_ns_;
  const uint64_t idle = (now_ns - window_start_) / window_ns_;
  if (idle > 0) {
    load_ *= std::pow(1.0 - alpha_, static_cast<double>(idle));
    window_start_ += idle * window_ns_;
  }
}

void LoadTracker::AddBusy(uint64_t now_ns, uint64_t busy_ns) {
  AdvanceTo(now_ns);
  busy_ += busy_ns;
}

}  // namespace raas
