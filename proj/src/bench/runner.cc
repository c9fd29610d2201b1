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

#include "raas/bench/runner.h"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <memory>
#include <queue>
#include <random>
#include <sstream>

#include "raas/bench/locked_qp.h"
#include "raas/daemon/daemon.h"
#include "raas/ipc/records.h"
#include "raas/verbs/fabric.h"
#include "raas/verbs/nic_model.h"

namespace raas::bench {
namespace {

using verbs::CompletionStatus;
using verbs::Fabric;
using verbs::NodeId;
using verbs::TransportMode;
using verbs::Verb;

// Bound on idle polls before a run is declared stuck.
constexpr int kMaxIdlePolls = 100000;

uint64_t ObjectBytes(const BenchScenario& s, const verbs::NodeResources& r) {
  return (r.qps + r.cqs + r.srqs) * s.object_bytes;
}

// One QP, CQ and landing region per connection, each posted by its own
// application. Every round posts one READ per connection and waits for all.
Result<PointResult> RunNaive(const BenchScenario& s, uint32_t n) {
  Fabric fabric(s.fabric);
  const NodeId client = fabric.AddNode();
  const NodeId server = fabric.AddNode();
  constexpr uint64_t kBlocks = 16;
  auto remote = fabric.RegisterMr(server, kBlocks * s.msg_size);
  if (!remote.ok()) return remote.status();
  auto server_cq = fabric.CreateCq(server);
  if (!server_cq.ok()) return server_cq.status();

  struct Conn {
    verbs::CqId cq;
    verbs::QpId qp;
    verbs::MrId mr;
    uint64_t posted_at = 0;
  };
  std::vector<Conn> conns;
  conns.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    auto cq = fabric.CreateCq(client);
    if (!cq.ok()) return cq.status();
    auto qp = fabric.CreateQp(client, TransportMode::kRC, *cq);
    if (!qp.ok()) return qp.status();
    auto peer = fabric.CreateQp(server, TransportMode::kRC, *server_cq);
    if (!peer.ok()) return peer.status();
    RAAS_RETURN_IF_ERROR(fabric.ConnectQp(*qp, *peer));
    auto mr = fabric.RegisterMr(client, s.msg_size);
    if (!mr.ok()) return mr.status();
    conns.push_back({*cq, *qp, mr->id});
  }

  std::mt19937_64 rng(s.seed);
  PointResult out;
  out.connections = n;
  auto round = [&](bool measure) -> Status {
    for (Conn& c : conns) {
      verbs::WorkRequest wr;
      wr.verb = Verb::kRead;
      wr.local = {c.mr, 0, s.msg_size};
      wr.remote = verbs::RemoteSlice{remote->remote_key,
                                     (rng() % kBlocks) * s.msg_size};
      c.posted_at = fabric.now_ns();
      RAAS_RETURN_IF_ERROR(fabric.PostSend(c.qp, wr));
    }
    for (Conn& c : conns) {
      int idle = 0;
      for (;;) {
        auto cqes = fabric.PollCq(c.cq, 1);
        if (!cqes.empty()) {
          if (cqes[0].status != CompletionStatus::kSuccess) {
            return Status(ErrorCode::kTransportError, "read failed");
          }
          if (measure) {
            ++out.ops;
            out.bytes += cqes[0].byte_count;
            out.latency_sum_ns +=
                static_cast<double>(cqes[0].timestamp_ns - c.posted_at);
          }
          break;
        }
        if (++idle > kMaxIdlePolls) {
          return Status(ErrorCode::kTimeout, "naive completion lost");
        }
      }
    }
    return Status::Ok();
  };

  RAAS_RETURN_IF_ERROR(round(false));
  fabric.ResetCounters();
  const uint64_t t0 = fabric.now_ns();
  while (fabric.now_ns() - t0 < s.duration_ns()) {
    RAAS_RETURN_IF_ERROR(round(true));
  }
  out.elapsed_ns = fabric.now_ns() - t0;
  out.cache_hit_rate = fabric.nic_counters(client).hit_rate();
  const auto res = fabric.resources(client);
  out.mem_bytes = res.registered_bytes + ObjectBytes(s, res);
  // Every application busy-polls its own CQ.
  out.cpu_ns = static_cast<double>(n) * static_cast<double>(out.elapsed_ns);
  return out;
}

// Connections multiplexed through a daemon on each host, driven
// step by step so that runs are reproducible.
Result<PointResult> RunRaas(const BenchScenario& s, uint32_t n) {
  Fabric fabric(s.fabric);
  Cluster cluster(fabric);
  const Addr client_addr = *Addr::Parse("ipv4:10.0.0.1");
  const Addr server_addr = *Addr::Parse("ipv4:10.0.0.2");
  auto client = cluster.AddHost(client_addr);
  if (!client.ok()) return client.status();
  auto server = cluster.AddHost(server_addr);
  if (!server.ok()) return server.status();

  DaemonConfig config;
  config.worker_count = s.workers;
  config.threaded = false;
  config.window_bytes = s.msg_size;
  config.worker_request_ns = s.worker_request_ns;
  config.policy.batching_window = s.batching_window;
  auto da = Daemon::Start(cluster, *client, config);
  if (!da.ok()) return da.status();
  auto db = Daemon::Start(cluster, *server, config);
  if (!db.ok()) return db.status();
  Daemon& a = **da;
  Daemon& b = **db;
  struct StopBoth {
    Daemon& a;
    Daemon& b;
    ~StopBoth() {
      a.Stop();
      b.Stop();
    }
  } stop_both{a, b};

  const AppId server_app = b.RegisterApp();
  auto lfd = b.Listen(server_app, server_addr);
  if (!lfd.ok()) return lfd.status();

  struct Conn {
    FdEndpoint ep;
    verbs::MrId mr = 0;
    uint64_t seq = 0;
    uint64_t pushed_at = 0;
    bool outstanding = false;
  };
  std::vector<Conn> conns(n);
  const Flags flags(Flags::kRc | Flags::kRead);
  for (Conn& c : conns) {
    const AppId app = a.RegisterApp();
    auto mr = a.RegisterAppMemory(app, s.msg_size);
    if (!mr.ok()) return mr.status();
    c.mr = mr->id;
    auto ep = a.Connect(app, server_addr, flags);
    if (!ep.ok()) return ep.status();
    c.ep = *ep;
    auto accepted = b.Accept(server_app, *lfd, std::chrono::milliseconds(0));
    if (!accepted.ok()) return accepted.status();
  }

  PointResult out;
  out.connections = n;
  auto round = [&](bool measure) -> Status {
    for (Conn& c : conns) {
      ipc::RequestRecord r;
      r.op = ipc::RequestOp::kSend;
      r.fd = c.ep.fd;
      r.region = c.mr;
      r.length = s.msg_size;
      r.flags = flags.bits();
      r.seq = ++c.seq;
      if (!c.ep.requests->TryPush(ipc::Encode(r))) {
        return Status(ErrorCode::kQueueFull, "request ring full");
      }
      c.pushed_at = fabric.now_ns();
      c.outstanding = true;
    }
    for (size_t w = 0; w < a.worker_count(); ++w) {
      while (a.WorkerDrain(w) > 0) {
      }
    }
    size_t left = conns.size();
    int idle = 0;
    while (left > 0) {
      a.PollerPoll();
      const uint64_t now = fabric.now_ns();
      bool progressed = false;
      for (Conn& c : conns) {
        while (auto wire = c.ep.responses->TryPop()) {
          auto rec = ipc::DecodeResponse(*wire);
          if (!rec.ok()) return rec.status();
          if (rec->status != ErrorCode::kOk) {
            return Status(rec->status, "read request failed");
          }
          if (!c.outstanding || rec->seq != c.seq) {
            return Status(ErrorCode::kInvalidArgument, "unexpected response");
          }
          c.outstanding = false;
          --left;
          progressed = true;
          if (measure) {
            ++out.ops;
            out.bytes += rec->length;
            out.latency_sum_ns += static_cast<double>(now - c.pushed_at);
          }
        }
      }
      if (progressed) {
        idle = 0;
      } else if (++idle > kMaxIdlePolls) {
        return Status(ErrorCode::kTimeout, "daemon response lost");
      }
    }
    return Status::Ok();
  };

  RAAS_RETURN_IF_ERROR(round(false));
  fabric.ResetCounters();
  const uint64_t requests0 = a.counters().requests;
  const uint64_t t0 = fabric.now_ns();
  while (fabric.now_ns() - t0 < s.duration_ns()) {
    RAAS_RETURN_IF_ERROR(round(true));
  }
  out.elapsed_ns = fabric.now_ns() - t0;
  out.cache_hit_rate = fabric.nic_counters(*client).hit_rate();
  const auto res = fabric.resources(*client);
  out.mem_bytes = res.registered_bytes + ObjectBytes(s, res) +
                  uint64_t{n} * 2 * config.ring_capacity * ipc::kRecordBytes;
  // The poller spins for the whole run; workers and applications pay per
  // request.
  const uint64_t requests = a.counters().requests - requests0;
  out.cpu_ns = static_cast<double>(out.elapsed_ns) +
               static_cast<double>(requests * s.worker_request_ns) +
               static_cast<double>(out.ops * s.app_request_ns);
  return out;
}

// q application threads per QP in logical time. Each thread owns the
// connections j with j % threads == thread and keeps one READ outstanding
// on each.
Result<PointResult> RunLocked(const BenchScenario& s, uint32_t n) {
  const uint32_t threads = std::max<uint32_t>(s.threads, 1);
  LockedQpAdapter adapter(threads, s.q, s.lock_hold_ns, s.lock_penalty_ns);
  verbs::NicModel nic(s.fabric.nic);
  std::mt19937_64 rng(s.seed);
  const uint64_t prop = s.fabric.propagation_ns;
  const uint64_t warm = s.duration_ns() / 10;
  const uint64_t end = warm + s.duration_ns();

  // completion time of each connection's outstanding READ; 0 when idle
  std::vector<uint64_t> done_at(n, 0);
  std::vector<uint64_t> requested_at(n, 0);
  std::vector<std::vector<uint32_t>> owned(threads);
  for (uint32_t j = 0; j < n; ++j) owned[j % threads].push_back(j);

  enum class Kind : uint8_t { kReady, kLock };
  struct Event {
    uint64_t t;
    uint64_t seq;
    uint32_t thread;
    Kind kind;
    uint32_t conn;
    bool operator>(const Event& o) const {
      return t != o.t ? t > o.t : seq > o.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  uint64_t seq = 0;
  for (uint32_t t = 0; t < threads; ++t) {
    if (!owned[t].empty()) events.push({0, seq++, t, Kind::kReady, 0});
  }

  PointResult out;
  out.connections = n;
  uint64_t nic_free = 0;
  uint64_t contended0 = 0;
  bool warmed = false;
  auto record = [&](uint32_t conn) {
    const uint64_t c = done_at[conn];
    if (c > warm && c <= end) {
      ++out.ops;
      out.bytes += s.msg_size;
      out.latency_sum_ns += static_cast<double>(c - requested_at[conn]);
    }
    done_at[conn] = 0;
  };

  while (!events.empty()) {
    const Event ev = events.top();
    events.pop();
    if (ev.t > end) break;
    if (!warmed && ev.t > warm) {
      warmed = true;
      nic.ResetCounters();
      contended0 = adapter.contended();
    }
    if (ev.kind == Kind::kReady) {
      uint64_t next_done = UINT64_MAX;
      std::optional<uint32_t> idle;
      for (uint32_t conn : owned[ev.thread]) {
        if (done_at[conn] != 0 && done_at[conn] <= ev.t) record(conn);
        if (done_at[conn] == 0) {
          if (!idle) idle = conn;
        } else {
          next_done = std::min(next_done, done_at[conn]);
        }
      }
      if (!idle) {
        events.push({next_done, seq++, ev.thread, Kind::kReady, 0});
        continue;
      }
      const uint64_t prep =
          s.app_request_ns / 2 + rng() % (s.app_request_ns + 1);
      events.push({ev.t + prep, seq++, ev.thread, Kind::kLock, *idle});
    } else {
      const uint32_t conn = ev.conn;
      requested_at[conn] = ev.t;
      const uint64_t issue = adapter.Post(
          ev.thread, ev.t, [&](size_t qp, uint64_t issue_ns) {
            const auto cost = nic.ServiceWorkRequest(
                static_cast<verbs::QpId>(qp + 1), s.msg_size, false);
            const uint64_t start = std::max(nic_free, issue_ns);
            nic_free = start + cost.cost_ns;
            done_at[conn] = nic_free + 2 * prop;
          });
      events.push({issue, seq++, ev.thread, Kind::kReady, 0});
    }
  }

  out.elapsed_ns = s.duration_ns();
  out.cache_hit_rate = nic.counters().hit_rate();
  out.contended = adapter.contended() - contended0;
  out.mem_bytes = adapter.qp_count() * 2 * s.object_bytes +
                  uint64_t{n} * s.msg_size;
  out.cpu_ns = static_cast<double>(std::min(threads, n)) *
               static_cast<double>(out.elapsed_ns);
  return out;
}

double Ratio(double num, double den) { return den == 0 ? 0.0 : num / den; }

std::vector<std::string> SplitCsv(std::string_view line) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    const size_t comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string MetricsReport::CsvHeader() {
  return "mode,q,connections,throughput_bytes_per_sim_sec,mean_latency_ns,"
         "mem_units,cpu_units,cache_hit_rate";
}

std::string MetricsReport::ToCsv() const {
  std::string out = CsvHeader() + "\n";
  char buf[256];
  for (const ReportRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%u,%u,%.1f,%.1f,%.4f,%.4f,%.4f\n",
                  std::string(ModeName(mode)).c_str(), q, r.connections,
                  r.throughput, r.mean_latency_ns, r.mem_units, r.cpu_units,
                  r.cache_hit_rate);
    out += buf;
  }
  return out;
}

Result<MetricsReport> MetricsReport::FromCsv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != CsvHeader()) {
    return Status(ErrorCode::kParseError, "missing csv header");
  }
  MetricsReport report;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = SplitCsv(line);
    if (f.size() != 8) {
      return Status(ErrorCode::kParseError, "bad csv row: " + line);
    }
    auto mode = ParseMode(f[0]);
    if (!mode.ok()) return mode.status();
    ReportRow r;
    try {
      const auto q = static_cast<uint32_t>(std::stoul(f[1]));
      if (first) {
        report.mode = *mode;
        report.q = q;
        first = false;
      } else if (*mode != report.mode || q != report.q) {
        return Status(ErrorCode::kParseError, "mixed modes in one csv");
      }
      r.connections = static_cast<uint32_t>(std::stoul(f[2]));
      r.throughput = std::stod(f[3]);
      r.mean_latency_ns = std::stod(f[4]);
      r.mem_units = std::stod(f[5]);
      r.cpu_units = std::stod(f[6]);
      r.cache_hit_rate = std::stod(f[7]);
    } catch (const std::exception&) {
      return Status(ErrorCode::kParseError, "bad number in: " + line);
    }
    report.rows.push_back(r);
  }
  return report;
}

const ReportRow* MetricsReport::Row(uint32_t connections) const {
  for (const ReportRow& r : rows) {
    if (r.connections == connections) return &r;
  }
  return nullptr;
}

Result<PointResult> RunPoint(const BenchScenario& s, uint32_t connections) {
  RAAS_RETURN_IF_ERROR(s.Validate());
  if (connections == 0) {
    return Status(ErrorCode::kBadConfig, "zero connections");
  }
  switch (s.mode) {
    case Mode::kNaive:
      return RunNaive(s, connections);
    case Mode::kRaas:
      return RunRaas(s, connections);
    case Mode::kLocked:
      return RunLocked(s, connections);
  }
  return Status(ErrorCode::kBadConfig, "unknown mode");
}

Result<MetricsReport> RunScenario(const BenchScenario& s) {
  RAAS_RETURN_IF_ERROR(s.Validate());
  std::vector<PointResult> points;
  for (uint32_t n : s.connections) {
    auto p = RunPoint(s, n);
    if (!p.ok()) return p.status();
    points.push_back(*p);
  }
  PointResult unit;
  if (points.front().connections == 1) {
    unit = points.front();
  } else {
    auto p = RunPoint(s, 1);
    if (!p.ok()) return p.status();
    unit = *p;
  }
  MetricsReport report;
  report.mode = s.mode;
  report.q = s.q;
  for (const PointResult& p : points) {
    ReportRow r;
    r.connections = p.connections;
    r.throughput = p.throughput();
    r.mean_latency_ns = p.mean_latency_ns();
    r.mem_units = Ratio(static_cast<double>(p.mem_bytes),
                        static_cast<double>(unit.mem_bytes));
    r.cpu_units = Ratio(p.cpu_rate(), unit.cpu_rate());
    r.cache_hit_rate = p.cache_hit_rate;
    report.rows.push_back(r);
  }
  return report;
}

}  // namespace raas::bench
