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

// bench: runs connection-scaling sweeps and checks trends in their CSVs.
//
//   bench run --scenario fig.scn --out fig.csv
//   bench sweep --mode naive --max-conns 1000 --out naive.csv
//   bench compare naive.csv raas.csv --check criteria.txt

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "raas/bench/report.h"
#include "raas/bench/runner.h"
#include "raas/bench/scenario.h"

namespace {

using raas::bench::BenchScenario;
using raas::bench::MetricsReport;

int Fail(const std::string& what) {
  std::cerr << "bench: " << what << "\n";
  return 2;
}

int Emit(const BenchScenario& s, const std::string& out_path) {
  auto report = raas::bench::RunScenario(s);
  if (!report.ok()) return Fail(report.status().ToString());
  const std::string csv = report->ToCsv();
  if (out_path.empty() || out_path == "-") {
    std::cout << csv;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  out << csv;
  if (!out) return Fail("cannot write " + out_path);
  return 0;
}

bool ReadFile(const std::string& path, std::string& text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buf;
  buf << in.rdbuf();
  text = buf.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RDMA connection-scaling benchmark"};
  app.require_subcommand(1);

  std::string scenario_path, out_path;
  auto* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("--scenario", scenario_path, "scenario file")->required();
  run->add_option("--out", out_path, "CSV output (default stdout)");

  std::string mode = "raas";
  uint32_t q = 1, max_conns = 1000, step = 100;
  BenchScenario sweep_s;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "sweep connection counts");
  sweep->add_option("--mode", mode, "naive, raas or locked")->required();
  sweep->add_option("--q", q, "threads per QP (locked)");
  sweep->add_option("--max-conns", max_conns, "largest connection count");
  sweep->add_option("--step", step, "sweep step");
  sweep->add_option("--out", sweep_out, "CSV output (default stdout)");
  sweep->add_option("--threads", sweep_s.threads, "application threads");
  sweep->add_option("--workers", sweep_s.workers, "daemon workers");
  sweep->add_option("--duration", sweep_s.duration_s, "simulated seconds");
  sweep->add_option("--seed", sweep_s.seed, "random seed");
  sweep->add_option("--msg-size", sweep_s.msg_size, "bytes per READ");
  sweep->add_option("--batching-window", sweep_s.batching_window,
                    "WRs per doorbell batch");
  sweep->add_option("--cache-capacity", sweep_s.fabric.nic.cache_capacity,
                    "NIC context cache entries");
  sweep->add_option("--lock-penalty", sweep_s.lock_penalty_ns,
                    "ns per contended lock acquisition");

  std::vector<std::string> csvs;
  std::string check_path;
  auto* compare = app.add_subcommand("compare", "check trends across CSVs");
  compare->add_option("csv", csvs, "reports, named by file stem")->required();
  compare->add_option("--check", check_path, "criteria file")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    auto s = BenchScenario::Load(scenario_path);
    if (!s.ok()) return Fail(s.status().ToString());
    return Emit(*s, out_path);
  }

  if (sweep->parsed()) {
    auto parsed = raas::bench::ParseMode(mode);
    if (!parsed.ok()) return Fail(parsed.status().ToString());
    sweep_s.mode = *parsed;
    sweep_s.name = "sweep";
    sweep_s.q = q;
    if (step == 0) return Fail("step must be positive");
    sweep_s.connections.clear();
    for (uint32_t n = step; n <= max_conns; n += step) {
      sweep_s.connections.push_back(n);
    }
    auto status = sweep_s.Validate();
    if (!status.ok()) return Fail(status.ToString());
    return Emit(sweep_s, sweep_out);
  }

  raas::bench::ReportSet reports;
  for (const std::string& path : csvs) {
    std::string text;
    if (!ReadFile(path, text)) return Fail("cannot read " + path);
    auto report = MetricsReport::FromCsv(text);
    if (!report.ok()) return Fail(path + ": " + report.status().ToString());
    reports[std::filesystem::path(path).stem().string()] = *report;
  }
  std::string criteria;
  if (!ReadFile(check_path, criteria)) return Fail("cannot read " + check_path);
  auto results = raas::bench::RunChecks(reports, criteria);
  if (!results.ok()) return Fail(results.status().ToString());
  bool all = true;
  for (const auto& r : *results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.line;
    if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
    std::cout << "\n";
    all = all && r.passed;
  }
  return all ? 0 : 1;
}
