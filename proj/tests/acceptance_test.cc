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

// Acceptance gate: runs criteria 1-10 and prints one PASS/FAIL line each.
// Exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "daemon_harness.h"
#include "ipc_stress.h"
#include "lru_oracle.h"
#include "policy_oracle.h"
#include "raas/bench/runner.h"
#include "raas/bench/scenario.h"
#include "raas/verbs/fabric.h"
#include "raas/verbs/nic_model.h"

namespace raas {
namespace {

using bench::BenchScenario;
using bench::MetricsReport;
using bench::Mode;
using verbs::TransportMode;
using verbs::Verb;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       since)
      .count();
}

MetricsReport Run(const BenchScenario& s) {
  auto r = bench::RunScenario(s);
  if (!r.ok()) {
    std::fprintf(stderr, "scenario %s: %s\n", s.name.c_str(),
                 r.status().ToString().c_str());
    return {};
  }
  return *r;
}

BenchScenario Sweep(Mode mode) {
  BenchScenario s;
  s.mode = mode;
  s.connections = {100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
  return s;
}

BenchScenario LockPoint(Mode mode, uint32_t q) {
  BenchScenario s;
  s.mode = mode;
  s.connections = {64};
  s.msg_size = 4096;
  s.threads = 8;
  s.q = q;
  if (mode == Mode::kRaas) s.workers = 8;
  return s;
}

double At(const MetricsReport& r, uint32_t n) {
  const auto* row = r.Row(n);
  return row == nullptr ? 0.0 : row->throughput;
}

// 1. Each (transport, verb) pair is accepted or refused exactly as the
// capability table says, and UD is capped at the MTU.
Outcome LegalityMatrix() {
  const auto t0 = std::chrono::steady_clock::now();
  verbs::Fabric fabric;
  const auto a = fabric.AddNode();
  const auto b = fabric.AddNode();
  const auto cq_a = *fabric.CreateCq(a);
  const auto cq_b = *fabric.CreateCq(b);
  const uint32_t mtu = fabric.config().nic.mtu;
  const auto local = *fabric.RegisterMr(a, mtu + 1);
  const auto remote = *fabric.RegisterMr(b, mtu + 1);
  struct Row {
    TransportMode mode;
    bool send, recv, write, read;
  };
  const Row table[] = {
      {TransportMode::kRC, true, true, true, true},
      {TransportMode::kUC, true, true, true, false},
      {TransportMode::kUD, true, true, false, false},
  };
  int pairs = 0, wrong = 0;
  for (const Row& row : table) {
    for (Verb verb : {Verb::kSend, Verb::kRecv, Verb::kWrite, Verb::kRead}) {
      const auto qp = *fabric.CreateQp(a, row.mode, cq_a);
      const auto peer = *fabric.CreateQp(b, row.mode, cq_b);
      if (row.mode != TransportMode::kUD) (void)fabric.ConnectQp(qp, peer);
      verbs::WorkRequest wr;
      wr.verb = verb;
      wr.local = {local.id, 0, 64};
      if (verb == Verb::kWrite || verb == Verb::kRead) {
        wr.remote = verbs::RemoteSlice{remote.remote_key, 0};
      }
      if (row.mode == TransportMode::kUD) wr.ud_destination = {{b}, peer};
      bool accepted;
      bool expected;
      if (verb == Verb::kRecv) {
        verbs::WorkRequest recv;
        recv.verb = Verb::kRecv;
        recv.local = {remote.id, 0, 64};
        accepted = fabric.PostRecv(peer, recv).ok();
        expected = row.recv;
      } else {
        const Status st = fabric.PostSend(qp, wr);
        accepted = st.ok();
        if (!accepted && st.code() != ErrorCode::kIllegalVerb) ++wrong;
        expected = verb == Verb::kSend    ? row.send
                   : verb == Verb::kWrite ? row.write
                                          : row.read;
      }
      if (accepted != expected) ++wrong;
      ++pairs;
    }
  }
  // UD: MTU fits, MTU + 1 does not.
  const auto ud = *fabric.CreateQp(a, TransportMode::kUD, cq_a);
  const auto ud_peer = *fabric.CreateQp(b, TransportMode::kUD, cq_b);
  verbs::WorkRequest big;
  big.verb = Verb::kSend;
  big.local = {local.id, 0, uint64_t{mtu} + 1};
  big.ud_destination = {{b}, ud_peer};
  if (fabric.PostSend(ud, big).code() != ErrorCode::kMsgTooLarge) ++wrong;
  big.local.length = mtu;
  if (!fabric.PostSend(ud, big).ok()) ++wrong;
  const double secs = Seconds(t0);
  return {pairs == 12 && wrong == 0 && secs < 1.0,
          Fmt("%.0f pairs, %.0f mismatches, %.3f s", pairs, wrong, secs)};
}

// 2. NAIVE falls off past the cache capacity; RAAS stays flat.
Outcome Cliff(const MetricsReport& naive, const MetricsReport& raas,
              double secs) {
  double peak = 0;
  for (const auto& r : naive.rows) {
    if (r.connections <= 400) peak = std::max(peak, r.throughput);
  }
  const double at_1000 = At(naive, 1000) / peak;
  uint32_t first_drop = 0;
  for (const auto& r : naive.rows) {
    if (r.throughput < 0.9 * peak) {
      first_drop = r.connections;
      break;
    }
  }
  double lo = 1e300, hi = 0;
  for (const auto& r : raas.rows) {
    lo = std::min(lo, r.throughput);
    hi = std::max(hi, r.throughput);
  }
  const double spread = lo > 0 ? hi / lo - 1.0 : 1.0;
  const bool drop_near = first_drop >= 300 && first_drop <= 500;
  return {at_1000 < 0.70 && drop_near && spread <= 0.05 && secs < 120,
          Fmt("naive(1000)/peak %.3f, first drop at %.0f, raas spread %.4f",
              at_1000, first_drop, spread) +
              Fmt(", %.1f s", secs)};
}

// 3. RAAS beats NAIVE below capacity whenever batching is on.
Outcome SubCapacity(const MetricsReport& naive) {
  bool ok = true;
  std::string detail;
  for (uint32_t window : {4u, 16u}) {
    BenchScenario s = Sweep(Mode::kRaas);
    s.connections = {200};
    s.batching_window = window;
    const double raas = At(Run(s), 200);
    ok = ok && raas > At(naive, 200);
    if (!detail.empty()) detail += ", ";
    detail += Fmt("window %.0f: raas/naive %.4f", window,
                  raas / At(naive, 200));
  }
  return {ok, detail};
}

// 4. Lock-free RAAS > locked q=3 >= locked q=6; zero penalty is lock-free.
Outcome LockContention() {
  const double raas = At(Run(LockPoint(Mode::kRaas, 1)), 64);
  const double q1 = At(Run(LockPoint(Mode::kLocked, 1)), 64);
  const double q3 = At(Run(LockPoint(Mode::kLocked, 3)), 64);
  const double q6 = At(Run(LockPoint(Mode::kLocked, 6)), 64);
  BenchScenario free3 = LockPoint(Mode::kLocked, 3);
  free3.lock_penalty_ns = 0;
  BenchScenario free6 = LockPoint(Mode::kLocked, 6);
  free6.lock_penalty_ns = 0;
  const double c3 = At(Run(free3), 64) / q1 - 1.0;
  const double c6 = At(Run(free6), 64) / q1 - 1.0;
  const bool order = raas > q3 && q3 >= q6 && q6 > 0;
  const bool control = std::fabs(c3) <= 0.02 && std::fabs(c6) <= 0.02;
  return {order && control,
          Fmt("raas/q3 %.2f, q3/q6 %.2f", raas / q3, q3 / q6) +
              Fmt(", zero-penalty deviation %.4f / %.4f", c3, c6)};
}

double SlopeOf(const MetricsReport& r, double bench::ReportRow::*field) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(r.rows.size());
  for (const auto& row : r.rows) {
    const double x = row.connections;
    const double y = row.*field;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// 5. NAIVE resources grow with slope 1; RAAS at most half of NAIVE at 10.
Outcome Resources() {
  BenchScenario naive_s = Sweep(Mode::kNaive);
  naive_s.connections = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  BenchScenario raas_s = naive_s;
  raas_s.mode = Mode::kRaas;
  const MetricsReport naive = Run(naive_s);
  const MetricsReport raas = Run(raas_s);
  if (naive.rows.size() != 10 || raas.rows.size() != 10) {
    return {false, "run failed"};
  }
  const double mem_slope = SlopeOf(naive, &bench::ReportRow::mem_units);
  const double cpu_slope = SlopeOf(naive, &bench::ReportRow::cpu_units);
  const double mem_ratio = raas.rows[9].mem_units / naive.rows[9].mem_units;
  const double cpu_ratio = raas.rows[9].cpu_units / naive.rows[9].cpu_units;
  const bool ok = std::fabs(mem_slope - 1.0) <= 0.1 &&
                  std::fabs(cpu_slope - 1.0) <= 0.1 && mem_ratio <= 0.5 &&
                  cpu_ratio <= 0.5 && raas.rows[0].mem_units == 1.0 &&
                  naive.rows[0].mem_units == 1.0;
  return {ok, Fmt("naive slopes mem %.3f cpu %.3f", mem_slope, cpu_slope) +
                  Fmt(", raas/naive at 10 apps mem %.3f cpu %.3f", mem_ratio,
                      cpu_ratio)};
}

// 6. Labeled payloads over 100 vqpns on one shared QP.
Outcome DemuxFuzz() {
  const auto r = testing::RunDemuxFuzz(100000, 100, 2024);
  const bool ok = r.finished && r.shared_qps == 1 && r.sent == 100000 &&
                  r.delivered == r.sent && r.responses == r.sent &&
                  r.cross_deliveries == 0 && r.corrupt == 0 &&
                  r.out_of_order == 0 && r.bad_responses == 0 &&
                  r.missing_responses == 0;
  return {ok, Fmt("%.0f delivered, %.0f cross, %.0f bad responses",
                  r.delivered, r.cross_deliveries, r.bad_responses)};
}

// 7. Ring FIFO, progress with a parked peer, no lost wakeups.
Outcome SpscRing() {
  const auto fifo = ipc::testing::RunFifoStress(1'000'000, 256);
  const auto obstruction = ipc::testing::RunObstructionCheck(100'000);
  const auto wake = ipc::testing::RunLostWakeupCheck(100'000, 7);
  const double worst_ms =
      std::chrono::duration<double, std::milli>(obstruction.worst_op).count();
  const bool ok = fifo.received == 1'000'000 && fifo.mismatches == 0 &&
                  obstruction.consumer_ops == 100'000 &&
                  obstruction.producer_ops == 100'000 && worst_ms < 200 &&
                  wake.sent == wake.received && wake.stalls == 0;
  return {ok, Fmt("fifo mismatches %.0f, worst op %.3f ms, stalls %.0f",
                  fifo.mismatches, worst_ms, wake.stalls)};
}

// 8. NIC cache decisions equal a brute-force LRU on random traces.
Outcome LruOracle() {
  std::mt19937 rng(8);
  uint64_t accesses = 0, mismatches = 0;
  for (uint32_t capacity : {1u, 16u, 100u, 400u}) {
    for (uint32_t spread : {capacity / 2 + 1, capacity + 1, 3 * capacity}) {
      std::uniform_int_distribution<verbs::QpId> pick(1, spread);
      std::vector<verbs::QpId> trace(10000);
      for (auto& qp : trace) qp = pick(rng);
      const auto expected = testing::BruteForceLru(trace, capacity);
      verbs::NicCostConfig config;
      config.cache_capacity = capacity;
      verbs::NicModel nic(config);
      for (size_t i = 0; i < trace.size(); ++i) {
        if (nic.Service(trace[i]).hit != expected[i]) ++mismatches;
        ++accesses;
      }
    }
  }
  return {mismatches == 0,
          Fmt("%.0f accesses, %.0f mismatches", accesses, mismatches)};
}

// 9. Same scenario and seed, same bytes.
Outcome Determinism(const MetricsReport& naive, const MetricsReport& raas) {
  bool ok = Run(Sweep(Mode::kNaive)).ToCsv() == naive.ToCsv() &&
            Run(Sweep(Mode::kRaas)).ToCsv() == raas.ToCsv();
  BenchScenario locked = Sweep(Mode::kLocked);
  locked.q = 3;
  locked.seed = 99;
  ok = ok && Run(locked).ToCsv() == Run(locked).ToCsv();
  return {ok, "naive, raas and locked sweeps rerun"};
}

// 10. Path selection contracts against an independent oracle.
Outcome PolicyContracts() {
  const int failures = testing::RunPolicyContracts(100000, 10);
  return {failures == 0, Fmt("%.0f disagreements in 100000 trials", failures)};
}

}  // namespace
}  // namespace raas

int main() {
  using raas::Outcome;
  int failed = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("%s criterion %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  };

  report(1, "legality matrix", raas::LegalityMatrix());
  const auto t0 = std::chrono::steady_clock::now();
  const auto naive = raas::Run(raas::Sweep(raas::bench::Mode::kNaive));
  const auto sweep = raas::Run(raas::Sweep(raas::bench::Mode::kRaas));
  report(2, "scalability cliff", raas::Cliff(naive, sweep, raas::Seconds(t0)));
  report(3, "sub-capacity advantage", raas::SubCapacity(naive));
  report(4, "lock contention", raas::LockContention());
  report(5, "resource growth", raas::Resources());
  report(6, "demux fuzz", raas::DemuxFuzz());
  report(7, "spsc ring", raas::SpscRing());
  report(8, "lru oracle", raas::LruOracle());
  report(9, "determinism", raas::Determinism(naive, sweep));
  report(10, "policy contracts", raas::PolicyContracts());
  std::printf("%d of 10 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
