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

#ifndef RAAS_TESTS_LRU_ORACLE_H_
#define RAAS_TESTS_LRU_ORACLE_H_

#include <cstddef>
#include <vector>

#include "raas/verbs/types.h"

namespace raas::testing {

// Reference LRU by stack distance: an access hits iff the same QP appears
// among the `capacity` most recent distinct QPs before it.
inline std::vector<bool> BruteForceLru(const std::vector<verbs::QpId>& trace,
                                       size_t capacity) {
  std::vector<bool> hits;
  hits.reserve(trace.size());
  for (size_t i = 0; i < trace.size(); ++i) {
    std::vector<verbs::QpId> distinct;
    bool hit = false;
    for (size_t j = i; j-- > 0 && distinct.size() < capacity;) {
      if (trace[j] == trace[i]) {
        hit = true;
        break;
      }
      bool seen = false;
      for (verbs::QpId d : distinct) seen = seen || d == trace[j];
      if (!seen) distinct.push_back(trace[j]);
    }
    hits.push_back(hit);
  }
  return hits;
}

}  // namespace raas::testing

#endif  // RAAS_TESTS_LRU_ORACLE_H_
