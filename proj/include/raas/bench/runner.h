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

#ifndef RAAS_BENCH_RUNNER_H_
#define RAAS_BENCH_RUNNER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "raas/bench/scenario.h"
#include "raas/common/status.h"

namespace raas::bench {

// Raw measurements of one sweep point, before normalization.
struct PointResult {
  uint32_t connections = 0;
  uint64_t ops = 0;
  uint64_t bytes = 0;
  uint64_t elapsed_ns = 0;  // measured simulated time
  double latency_sum_ns = 0;
  double cache_hit_rate = 0;
  uint64_t mem_bytes = 0;   // memory charged to the client host
  double cpu_ns = 0;        // CPU time charged to the client host
  uint64_t contended = 0;   // locked mode: contended acquisitions

  double throughput() const {
    return elapsed_ns == 0 ? 0.0 : static_cast<double>(bytes) * 1e9 /
                                       static_cast<double>(elapsed_ns);
  }
  double mean_latency_ns() const {
    return ops == 0 ? 0.0 : latency_sum_ns / static_cast<double>(ops);
  }
  double cpu_rate() const {
    return elapsed_ns == 0 ? 0.0 : cpu_ns / static_cast<double>(elapsed_ns);
  }
};

struct ReportRow {
  uint32_t connections = 0;
  double throughput = 0;  // bytes per simulated second
  double mean_latency_ns = 0;
  double mem_units = 0;
  double cpu_units = 0;
  double cache_hit_rate = 0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct MetricsReport {
  Mode mode = Mode::kRaas;
  uint32_t q = 1;
  std::vector<ReportRow> rows;

  static std::string CsvHeader();
  std::string ToCsv() const;
  static Result<MetricsReport> FromCsv(std::string_view text);
  const ReportRow* Row(uint32_t connections) const;
};

// Runs one sweep point of `scenario` with `connections` connections.
Result<PointResult> RunPoint(const BenchScenario& scenario,
                             uint32_t connections);

// Runs every sweep point. Memory and CPU are expressed in units of what a
// single application needs in the same mode.
Result<MetricsReport> RunScenario(const BenchScenario& scenario);

}  // namespace raas::bench

#endif  // RAAS_BENCH_RUNNER_H_
