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

#include "raas/bench/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

namespace raas::bench {
namespace {

Status Bad(const std::string& line, const std::string& why) {
  return Status(ErrorCode::kParseError, why + ": " + line);
}

Result<double> Column(const ReportRow& r, std::string_view column) {
  if (column == "throughput") return r.throughput;
  if (column == "latency") return r.mean_latency_ns;
  if (column == "mem") return r.mem_units;
  if (column == "cpu") return r.cpu_units;
  if (column == "hit_rate") return r.cache_hit_rate;
  return Status(ErrorCode::kParseError,
                "unknown column " + std::string(column));
}

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Line {
  std::vector<std::string> words;
  std::map<std::string, std::string> kv;
};

Line Tokenize(const std::string& text) {
  Line out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    const size_t eq = tok.find('=');
    if (eq == std::string::npos) {
      out.words.push_back(tok);
    } else {
      out.kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  return out;
}

class Evaluator {
 public:
  Evaluator(const ReportSet& reports, const std::string& text)
      : reports_(reports), text_(text), line_(Tokenize(text)) {}

  Result<CheckResult> Run() {
    const std::string& kind = line_.words[0];
    if (kind == "drop") return Drop();
    if (kind == "first_drop") return FirstDrop();
    if (kind == "flat") return Flat();
    if (kind == "greater" || kind == "at_least" || kind == "close" ||
        kind == "ratio_le") {
      return Compare(kind);
    }
    if (kind == "slope") return SlopeCheck();
    if (kind == "identical") return Identical();
    return Bad(text_, "unknown check");
  }

 private:
  Result<const MetricsReport*> Report(size_t word) {
    if (line_.words.size() <= word) return Bad(text_, "missing report label");
    auto it = reports_.find(line_.words[word]);
    if (it == reports_.end()) {
      return Bad(text_, "no report " + line_.words[word]);
    }
    return &it->second;
  }

  Result<double> Number(const std::string& key,
                        std::optional<double> fallback = std::nullopt) {
    auto it = line_.kv.find(key);
    if (it == line_.kv.end()) {
      if (fallback) return *fallback;
      return Bad(text_, "missing " + key);
    }
    try {
      size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(key);
      return v;
    } catch (const std::exception&) {
      return Bad(text_, "bad number for " + key);
    }
  }

  std::string ColumnName() {
    auto it = line_.kv.find("column");
    return it == line_.kv.end() ? "throughput" : it->second;
  }

  Result<double> ValueAt(const MetricsReport& r, double n) {
    const ReportRow* row = r.Row(static_cast<uint32_t>(n));
    if (row == nullptr) return Bad(text_, "no row at " + Num(n));
    return Column(*row, ColumnName());
  }

  Result<double> PeakUpTo(const MetricsReport& r, double max_n) {
    double peak = -1;
    for (const ReportRow& row : r.rows) {
      if (row.connections > max_n) continue;
      auto v = Column(row, ColumnName());
      if (!v.ok()) return v.status();
      peak = std::max(peak, *v);
    }
    if (peak < 0) return Bad(text_, "no rows up to " + Num(max_n));
    return peak;
  }

  CheckResult Done(bool passed, std::string detail) {
    return CheckResult{text_, passed, std::move(detail)};
  }

  Result<CheckResult> Drop() {
    auto r = Report(1);
    if (!r.ok()) return r.status();
    auto at = Number("at");
    auto peak_max = Number("peak_max");
    auto below = Number("below");
    if (!at.ok()) return at.status();
    if (!peak_max.ok()) return peak_max.status();
    if (!below.ok()) return below.status();
    auto v = ValueAt(**r, *at);
    if (!v.ok()) return v.status();
    auto peak = PeakUpTo(**r, *peak_max);
    if (!peak.ok()) return peak.status();
    const double ratio = *peak == 0 ? 0 : *v / *peak;
    return Done(ratio < *below, "ratio " + Num(ratio));
  }

  Result<CheckResult> FirstDrop() {
    auto r = Report(1);
    if (!r.ok()) return r.status();
    auto threshold = Number("threshold");
    auto near = Number("near");
    auto steps = Number("steps", 1);
    if (!threshold.ok()) return threshold.status();
    if (!near.ok()) return near.status();
    if (!steps.ok()) return steps.status();
    auto peak = PeakUpTo(**r, *near);
    if (!peak.ok()) return peak.status();
    const auto& rows = (*r)->rows;
    std::optional<size_t> near_index, drop_index;
    for (size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].connections == static_cast<uint32_t>(*near)) near_index = i;
      auto v = Column(rows[i], ColumnName());
      if (!v.ok()) return v.status();
      if (!drop_index && *v < *threshold * *peak) drop_index = i;
    }
    if (!near_index) return Bad(text_, "no row at " + Num(*near));
    if (!drop_index) return Done(false, "never drops");
    const double distance = std::fabs(static_cast<double>(*drop_index) -
                                      static_cast<double>(*near_index));
    return Done(distance <= *steps,
                "first drop at " + std::to_string(rows[*drop_index].connections));
  }

  Result<CheckResult> Flat() {
    auto r = Report(1);
    if (!r.ok()) return r.status();
    auto max_ratio = Number("max_ratio");
    auto from = Number("from", 0);
    auto to = Number("to", 1e18);
    if (!max_ratio.ok()) return max_ratio.status();
    if (!from.ok()) return from.status();
    if (!to.ok()) return to.status();
    double lo = INFINITY, hi = -INFINITY;
    for (const ReportRow& row : (*r)->rows) {
      if (row.connections < *from || row.connections > *to) continue;
      auto v = Column(row, ColumnName());
      if (!v.ok()) return v.status();
      lo = std::min(lo, *v);
      hi = std::max(hi, *v);
    }
    if (lo > hi) return Bad(text_, "no rows in range");
    const double ratio = lo <= 0 ? INFINITY : hi / lo;
    return Done(ratio <= *max_ratio, "max/min " + Num(ratio));
  }

  Result<CheckResult> Compare(const std::string& kind) {
    auto a = Report(1);
    auto b = Report(2);
    if (!a.ok()) return a.status();
    if (!b.ok()) return b.status();
    auto at = Number("at");
    if (!at.ok()) return at.status();
    auto va = ValueAt(**a, *at);
    auto vb = ValueAt(**b, *at);
    if (!va.ok()) return va.status();
    if (!vb.ok()) return vb.status();
    const std::string values = Num(*va) + " vs " + Num(*vb);
    if (kind == "greater") return Done(*va > *vb, values);
    if (kind == "at_least") return Done(*va >= *vb, values);
    if (kind == "close") {
      auto within = Number("within");
      if (!within.ok()) return within.status();
      return Done(std::fabs(*va - *vb) <= *within * std::fabs(*vb), values);
    }
    auto max = Number("max");
    if (!max.ok()) return max.status();
    const double ratio = *vb == 0 ? INFINITY : *va / *vb;
    return Done(ratio <= *max, "ratio " + Num(ratio));
  }

  Result<CheckResult> SlopeCheck() {
    auto r = Report(1);
    if (!r.ok()) return r.status();
    auto expect = Number("expect");
    auto tolerance = Number("tolerance");
    if (!expect.ok()) return expect.status();
    if (!tolerance.ok()) return tolerance.status();
    auto slope = Slope(**r, ColumnName());
    if (!slope.ok()) return slope.status();
    return Done(std::fabs(*slope - *expect) <= *tolerance,
                "slope " + Num(*slope));
  }

  Result<CheckResult> Identical() {
    auto a = Report(1);
    auto b = Report(2);
    if (!a.ok()) return a.status();
    if (!b.ok()) return b.status();
    return Done((*a)->ToCsv() == (*b)->ToCsv(), "");
  }

  const ReportSet& reports_;
  std::string text_;
  Line line_;
};

}  // namespace

Result<double> Slope(const MetricsReport& report, std::string_view column) {
  const size_t n = report.rows.size();
  if (n < 2) return Status(ErrorCode::kInvalidArgument, "need two rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const ReportRow& row : report.rows) {
    auto y = Column(row, column);
    if (!y.ok()) return y.status();
    const double x = row.connections;
    sx += x;
    sy += *y;
    sxx += x * x;
    sxy += x * *y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0) return Status(ErrorCode::kInvalidArgument, "degenerate x");
  return (n * sxy - sx * sy) / den;
}

Result<std::vector<CheckResult>> RunChecks(const ReportSet& reports,
                                           std::string_view criteria) {
  std::vector<CheckResult> out;
  std::istringstream in{std::string(criteria)};
  std::string line;
  while (std::getline(in, line)) {
    if (const size_t hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    const size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const size_t last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    auto result = Evaluator(reports, line).Run();
    if (!result.ok()) return result.status();
    out.push_back(*result);
  }
  return out;
}

}  // namespace raas::bench
