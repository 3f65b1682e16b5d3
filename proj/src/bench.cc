// Copyright 2026 The KaaS Authors
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

#include "kaas/bench.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <queue>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "kaas/codec.h"
#include "kaas/error.h"
#include "kaas/executor.h"
#include "kaas/fleet.h"
#include "kaas/object_store.h"
#include "kaas/server.h"

namespace kaas {

BenchMode BenchOptions::mode() const {
  if (over_http) return BenchMode::kHttp;
  return clients > 1 ? BenchMode::kThreaded : BenchMode::kVirtual;
}

std::uint64_t DefaultCapacity(const WorkloadSpec& spec) {
  if (spec.kind == WorkloadKind::kMatmulChain) {
    const std::uint64_t matrix = spec.matrix_dim * spec.matrix_dim * 4;
    return std::max<std::uint64_t>(1 << 20, 8 * matrix);
  }
  return 31 * kZipfBlobBytes;
}

namespace {

using ps = VirtualDuration;

struct RequestRecord {
  ExecutorId executor = 0;
  ps latency{0};
  ps compute{0};
  IoStats io;
  bool ok = false;
};

ps ComputeOf(const KaasResponse& resp) {
  ps total{0};
  for (const auto& t : resp.per_invocation) total += t.simulated_compute_time;
  return total;
}

PassStats Summarize(const std::vector<RequestRecord>& records,
                    std::size_t executors, ps makespan) {
  PassStats s;
  s.requests = records.size();
  s.per_executor_requests.assign(executors, 0);
  std::vector<std::int64_t> latencies;
  ps compute{0};
  double latency_sum = 0;
  for (const auto& r : records) {
    if (!r.ok) ++s.failed;
    s.cache_hits += r.io.cache_hits;
    s.cache_misses += r.io.cache_misses;
    s.store_gets += r.io.store_gets;
    s.store_puts += r.io.store_puts;
    ++s.per_executor_requests[r.executor];
    latencies.push_back(r.latency.count());
    latency_sum += ToSeconds(r.latency);
    compute += r.compute;
  }
  const auto lookups = s.cache_hits + s.cache_misses;
  s.hit_rate = lookups == 0 ? 0.0 : static_cast<double>(s.cache_hits) / lookups;
  if (!latencies.empty()) {
    std::sort(latencies.begin(), latencies.end());
    s.mean_latency = latency_sum / latencies.size();
    const auto rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(latencies.size())));
    s.p95_latency = ToSeconds(ps(latencies[std::max<std::size_t>(rank, 1) - 1]));
  }
  s.makespan = ToSeconds(makespan);
  if (makespan.count() > 0) {
    s.gpu_busy_fraction =
        ToSeconds(compute) / (static_cast<double>(executors) * s.makespan);
  }
  return s;
}

// ---- virtual mode ----

// Executors plus router advanced on one virtual timeline. Each executor runs
// its requests in routing order, so executing a request as soon as it is
// routed yields the same cache history as a real FIFO queue; only the
// digest updates wait for the virtual completion time.
class VirtualFleet {
 public:
  VirtualFleet(const BenchOptions& o, std::uint64_t capacity,
               std::size_t digest_cap, RoutingPolicy policy,
               std::shared_ptr<ObjectStore> store)
      : router_(o.executors, policy, digest_cap), free_at_(o.executors, ps{0}) {
    auto registry =
        std::make_shared<const KernelRegistry>(KernelRegistry::WithBuiltins());
    for (std::size_t i = 0; i < o.executors; ++i) {
      executors_.push_back(MakeSimulatedExecutor({i, capacity, o.timing}, store,
                                                 registry));
    }
  }

  // Returns the records and advances `clock` to the last completion.
  std::vector<RequestRecord> RunPass(const std::vector<KaasRequest>& requests,
                                     ps gap, ps& clock) {
    struct Completion {
      ps finish;
      std::size_t seq;
      ExecutorId executor;
      const KaasRequest* req;
      KaasResponse resp;
      bool operator>(const Completion& o) const {
        return finish != o.finish ? finish > o.finish : seq > o.seq;
      }
    };
    std::priority_queue<Completion, std::vector<Completion>, std::greater<>>
        pending;
    auto complete_until = [&](ps t) {
      while (!pending.empty() && pending.top().finish <= t) {
        const Completion& c = pending.top();
        router_.UpdateDigest(c.executor, *c.req, c.resp);
        pending.pop();
      }
    };

    const ps start = clock;
    ps last = start;
    std::vector<RequestRecord> records;
    records.reserve(requests.size());
    for (std::size_t i = 0; i < requests.size(); ++i) {
      const ps arrival = start + gap * static_cast<std::int64_t>(i);
      complete_until(arrival);
      const KaasRequest& req = requests[i];
      const ExecutorId e = router_.Route(req);
      KaasResponse resp = executors_[e]->Execute(req);
      const ps begin = std::max(arrival, free_at_[e]);
      const ps finish = begin + resp.simulated_total_time;
      free_at_[e] = finish;
      last = std::max(last, finish);
      records.push_back({e, finish - arrival, ComputeOf(resp), resp.io_stats,
                         resp.ok()});
      pending.push({finish, i, e, &req, std::move(resp)});
    }
    complete_until(ps::max());
    clock = last;
    return records;
  }

 private:
  Router router_;
  std::vector<std::unique_ptr<Executor>> executors_;
  std::vector<ps> free_at_;
};

// ---- threaded and http modes ----

// Runs `submit(i)` for every request index from `clients` threads, thread c
// taking indices c, c + clients, ...
template <typename Submit>
std::vector<RequestRecord> Drive(std::size_t count, std::size_t clients,
                                 Submit submit) {
  std::vector<RequestRecord> records(count);
  std::vector<std::thread> threads;
  for (std::size_t c = 0; c < clients; ++c) {
    threads.emplace_back([&, c] {
      for (std::size_t i = c; i < count; i += clients) records[i] = submit(i);
    });
  }
  for (auto& t : threads) t.join();
  return records;
}

ps MaxBusyDelta(const std::vector<ExecutorStats>& before,
                const std::vector<ExecutorStats>& after) {
  ps out{0};
  for (std::size_t i = 0; i < after.size(); ++i) {
    out = std::max(out, after[i].busy_time - before[i].busy_time);
  }
  return out;
}

std::vector<ExecutorStats> DecodeStats(const std::string& body) {
  const auto j = nlohmann::json::parse(body);
  std::vector<ExecutorStats> out;
  for (const auto& e : j.at("executors")) {
    ExecutorStats s;
    s.executor_id = e.at("executor_id").get<std::size_t>();
    s.requests = e.at("requests").get<std::uint64_t>();
    s.busy_time = ps(e.at("busy_time").get<std::int64_t>());
    out.push_back(s);
  }
  return out;
}

std::pair<std::string, int> SplitAddress(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) {
    throw KaasError(ErrorKind::kInvalidConfig,
                    "address must be host:port, got \"" + addr + "\"");
  }
  try {
    return {addr.substr(0, colon), std::stoi(addr.substr(colon + 1))};
  } catch (const std::exception&) {
    throw KaasError(ErrorKind::kInvalidConfig, "bad port in \"" + addr + "\"");
  }
}

[[noreturn]] void TransportFail(const std::string& what) {
  throw KaasError(ErrorKind::kStoreIo, "bench transport: " + what);
}

class HttpPass {
 public:
  HttpPass(const BenchOptions& o, const FleetConfig& fc) {
    ServerConfig sc;
    sc.fleet = fc;
    sc.schema = SchemaMode::kStrict;
    server_ = std::make_unique<KaasServer>(sc, std::make_shared<MemoryStore>());
    auto [host, port] = SplitAddress(*o.over_http);
    host_ = host;
    port_ = server_->Bind(host, port);
    thread_ = std::thread([this] { server_->Listen(); });
    server_->WaitUntilReady();
  }

  ~HttpPass() {
    server_->Stop();
    thread_.join();
  }

  void Upload(const ObjectStore& source) {
    httplib::Client client(host_, port_);
    for (const auto& key : source.ListKeys()) {
      const Bytes data = source.Get(key);
      auto res = client.Put("/v1/objects/" + key,
                            std::string(reinterpret_cast<const char*>(data.data()),
                                        data.size()),
                            "application/octet-stream");
      if (!res || res->status != 204) TransportFail("upload of " + key);
    }
  }

  std::vector<ExecutorStats> Stats() {
    httplib::Client client(host_, port_);
    auto res = client.Get("/v1/stats");
    if (!res || res->status != 200) TransportFail("GET /v1/stats");
    return DecodeStats(res->body);
  }

  std::vector<RequestRecord> RunPass(const std::vector<KaasRequest>& requests,
                                     std::size_t clients) {
    return Drive(requests.size(), clients, [&](std::size_t i) {
      // One client per call keeps sessions thread-confined.
      httplib::Client client(host_, port_);
      auto res = client.Post("/v1/invoke", EncodeRequest(requests[i]),
                             "application/json");
      if (!res) TransportFail("POST /v1/invoke");
      const KaasResponse resp = DecodeResponse(res->body);
      return RequestRecord{0, resp.simulated_total_time, ComputeOf(resp),
                           resp.io_stats, resp.ok()};
    });
  }

 private:
  std::unique_ptr<KaasServer> server_;
  std::string host_;
  int port_ = 0;
  std::thread thread_;
};

// Per-executor counts in http mode come from the server's counters.
void AssignExecutorCounts(PassStats& s, const std::vector<ExecutorStats>& before,
                          const std::vector<ExecutorStats>& after) {
  for (std::size_t i = 0; i < after.size(); ++i) {
    s.per_executor_requests[i] = after[i].requests - before[i].requests;
  }
}

}  // namespace

BenchReport RunBench(const BenchOptions& options) {
  options.workload.Validate();
  if (options.policies.empty()) {
    throw KaasError(ErrorKind::kInvalidConfig, "no policies given");
  }
  if (options.executors == 0) {
    throw KaasError(ErrorKind::kInvalidConfig, "executor count must be >= 1");
  }
  if (options.clients == 0) {
    throw KaasError(ErrorKind::kInvalidConfig, "clients must be >= 1");
  }
  options.timing.Validate();

  BenchReport report;
  report.workload = options.workload;
  report.mode = options.mode();
  report.executors = options.executors;
  report.capacity = options.capacity != 0 ? options.capacity
                                          : DefaultCapacity(options.workload);
  report.digest_cap = options.digest_cap;
  if (report.digest_cap == 0) {
    report.digest_cap = options.workload.kind == WorkloadKind::kMatmulChain
                            ? 1024
                            : std::max<std::size_t>(
                                  1, report.capacity / kZipfBlobBytes);
  }
  report.clients = options.clients;
  report.interarrival = options.interarrival;

  const std::vector<KaasRequest> requests = MakeRequests(options.workload);
  const std::size_t passes = options.warm_repeat ? 2 : 1;

  for (const RoutingPolicy& policy : options.policies) {
    PolicyReport pr;
    pr.policy = policy.ToString();
    auto store = std::make_shared<MemoryStore>();
    GenData(options.workload, *store);
    FleetConfig fc{options.executors, report.capacity, options.timing, policy,
                   report.digest_cap};
    fc.Validate();

    std::vector<PassStats> results;
    switch (report.mode) {
      case BenchMode::kVirtual: {
        VirtualFleet fleet(options, report.capacity, report.digest_cap, policy,
                           store);
        ps clock{0};
        for (std::size_t p = 0; p < passes; ++p) {
          const ps start = clock;
          auto records = fleet.RunPass(requests, options.interarrival, clock);
          results.push_back(Summarize(records, options.executors, clock - start));
        }
        break;
      }
      case BenchMode::kThreaded: {
        Fleet fleet(fc, store);
        for (std::size_t p = 0; p < passes; ++p) {
          const auto before = fleet.Stats();
          auto records =
              Drive(requests.size(), options.clients, [&](std::size_t i) {
                ExecutorId placed = 0;
                const KaasResponse resp = fleet.Submit(requests[i], &placed);
                return RequestRecord{placed, resp.simulated_total_time,
                                     ComputeOf(resp), resp.io_stats, resp.ok()};
              });
          results.push_back(Summarize(records, options.executors,
                                      MaxBusyDelta(before, fleet.Stats())));
        }
        break;
      }
      case BenchMode::kHttp: {
        HttpPass http(options, fc);
        http.Upload(*store);
        for (std::size_t p = 0; p < passes; ++p) {
          const auto before = http.Stats();
          auto records = http.RunPass(requests, options.clients);
          const auto after = http.Stats();
          PassStats s =
              Summarize(records, options.executors, MaxBusyDelta(before, after));
          AssignExecutorCounts(s, before, after);
          results.push_back(std::move(s));
        }
        break;
      }
    }
    pr.first = results[0];
    if (results.size() > 1) pr.warm = results[1];
    report.policies.push_back(std::move(pr));
  }
  return report;
}

namespace {

std::string_view ModeName(BenchMode m) {
  switch (m) {
    case BenchMode::kVirtual:
      return "virtual";
    case BenchMode::kThreaded:
      return "threaded";
    case BenchMode::kHttp:
      return "http";
  }
  return "virtual";
}

nlohmann::ordered_json PassJson(const PassStats& s) {
  return {{"requests", s.requests},
          {"failed", s.failed},
          {"hit_rate", s.hit_rate},
          {"cache_hits", s.cache_hits},
          {"cache_misses", s.cache_misses},
          {"store_gets", s.store_gets},
          {"store_puts", s.store_puts},
          {"mean_latency", s.mean_latency},
          {"p95_latency", s.p95_latency},
          {"makespan", s.makespan},
          {"per_executor_requests", s.per_executor_requests},
          {"gpu_busy_fraction", s.gpu_busy_fraction}};
}

}  // namespace

std::string ReportToJson(const BenchReport& r) {
  nlohmann::ordered_json j;
  j["report_version"] = kReportVersion;
  j["workload"] = {{"kind", std::string(WorkloadKindName(r.workload.kind))},
                   {"request_count", r.workload.request_count},
                   {"matrix_dim", r.workload.matrix_dim},
                   {"zipf_s", r.workload.zipf_s},
                   {"key_universe", r.workload.key_universe},
                   {"seed", r.workload.seed}};
  j["mode"] = std::string(ModeName(r.mode));
  j["executors"] = r.executors;
  j["capacity"] = r.capacity;
  j["digest_cap"] = r.digest_cap;
  j["clients"] = r.clients;
  j["interarrival"] = ToSeconds(r.interarrival);
  j["policies"] = nlohmann::ordered_json::array();
  for (const auto& p : r.policies) {
    nlohmann::ordered_json pj = PassJson(p.first);
    pj = {{"policy", p.policy}, {"first", pj}};
    if (p.warm) pj["warm"] = PassJson(*p.warm);
    j["policies"].push_back(std::move(pj));
  }
  return j.dump(2) + "\n";
}

std::string ReportToTable(const BenchReport& r) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line,
                "workload=%s requests=%zu executors=%zu capacity=%llu "
                "mode=%s clients=%zu\n",
                std::string(WorkloadKindName(r.workload.kind)).c_str(),
                r.workload.request_count, r.executors,
                static_cast<unsigned long long>(r.capacity),
                std::string(ModeName(r.mode)).c_str(), r.clients);
  out += line;
  std::snprintf(line, sizeof line, "%-14s %-5s %8s %9s %9s %12s %12s %8s  %s\n",
                "policy", "pass", "hit_rate", "gets", "puts", "mean_lat_s",
                "p95_lat_s", "gpu_busy", "per_executor");
  out += line;
  auto row = [&](const std::string& policy, const char* pass,
                 const PassStats& s) {
    std::string per;
    for (auto n : s.per_executor_requests) {
      if (!per.empty()) per += ",";
      per += std::to_string(n);
    }
    std::snprintf(line, sizeof line,
                  "%-14s %-5s %8.4f %9llu %9llu %12.6g %12.6g %8.4f  %s\n",
                  policy.c_str(), pass, s.hit_rate,
                  static_cast<unsigned long long>(s.store_gets),
                  static_cast<unsigned long long>(s.store_puts), s.mean_latency,
                  s.p95_latency, s.gpu_busy_fraction, per.c_str());
    out += line;
  };
  for (const auto& p : r.policies) {
    row(p.policy, "first", p.first);
    if (p.warm) row(p.policy, "warm", *p.warm);
  }
  return out;
}

}  // namespace kaas
