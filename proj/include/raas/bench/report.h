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

#ifndef RAAS_BENCH_REPORT_H_
#define RAAS_BENCH_REPORT_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "raas/bench/runner.h"
#include "raas/common/status.h"

namespace raas::bench {

// Trend assertions over named reports, one per line; `#` starts a comment.
// Reports are named by label (the CSV file stem). Columns are throughput
// (default), latency, mem, cpu and hit_rate.
//
//   drop L at=N peak_max=M below=F      L(N) < F * max L(n<=M)
//   first_drop L threshold=F near=M steps=K
//       the first point below F * max L(n<=M) is within K steps of M
//   flat L max_ratio=F [from=A] [to=B]  max/min over [A,B] <= F
//   greater A B at=N                    A(N) > B(N)
//   at_least A B at=N                   A(N) >= B(N)
//   close A B at=N within=F             |A(N) - B(N)| <= F * B(N)
//   slope L column=C expect=V tolerance=T
//       least-squares slope of C against n is V +/- T
//   ratio_le A B column=C at=N max=F    A(N) / B(N) <= F
//   identical A B                       same rows
struct CheckResult {
  std::string line;
  bool passed = false;
  std::string detail;
};

using ReportSet = std::map<std::string, MetricsReport>;

Result<std::vector<CheckResult>> RunChecks(const ReportSet& reports,
                                           std::string_view criteria);

// Least-squares slope of `column` against connection count.
Result<double> Slope(const MetricsReport& report, std::string_view column);

}  // namespace raas::bench

#endif  // RAAS_BENCH_REPORT_H_
