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

#ifndef KAAS_BENCH_H_
#define KAAS_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kaas/router.h"
#include "kaas/timing.h"
#include "kaas/virtual_time.h"
#include "kaas/workload.h"

namespace kaas {

inline constexpr int kReportVersion = 1;

/// How requests reach the fleet.
///   virtual:  one submitter, open-loop arrivals on the virtual clock, no
///             threads; fully deterministic.
///   threaded: `clients` real submitter threads against the in-process fleet.
///   http:     an in-process server per policy, driven over HTTP.
enum class BenchMode { kVirtual, kThreaded, kHttp };

struct BenchOptions {
  WorkloadSpec workload;
  std::vector<RoutingPolicy> policies;
  std::size_t executors = 4;
  /// 0 picks a workload-specific default (see `DefaultCapacity`).
  std::uint64_t capacity = 0;
  /// 0 picks capacity / 64 KiB for zipf workloads, 1024 otherwise.
  std::size_t digest_cap = 0;
  TimingModel timing;
  /// Gap between arrivals in virtual mode.
  VirtualDuration interarrival = std::chrono::microseconds(50);
  std::size_t clients = 1;
  /// Run the request stream a second time against the warmed fleet.
  bool warm_repeat = false;
  /// host:port for http mode.
  std::optional<std::string> over_http;

  BenchMode mode() const;
};

/// zipf_const and mixed: 30 blobs plus one blob of slack; matmul_chain:
/// max(1 MiB, 8 matrices).
std::uint64_t DefaultCapacity(const WorkloadSpec& spec);

struct PassStats {
  std::size_t requests = 0;
  std::size_t failed = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  double hit_rate = 0;
  std::uint64_t store_gets = 0;
  std::uint64_t store_puts = 0;
  /// Virtual seconds.
  double mean_latency = 0;
  double p95_latency = 0;
  double makespan = 0;
  std::vector<std::size_t> per_executor_requests;
  /// Sum of compute time / (executors × makespan).
  double gpu_busy_fraction = 0;
};

struct PolicyReport {
  std::string policy;
  PassStats first;
  std::optional<PassStats> warm;
};

struct BenchReport {
  WorkloadSpec workload;
  BenchMode mode = BenchMode::kVirtual;
  std::size_t executors = 0;
  std::uint64_t capacity = 0;
  std::size_t digest_cap = 0;
  std::size_t clients = 1;
  VirtualDuration interarrival{0};
  std::vector<PolicyReport> policies;
};

/// Runs the workload once per policy against a fresh fleet and store
/// populated by `GenData` with identical seeds. Throws kInvalidWorkload or
/// kInvalidConfig.
BenchReport RunBench(const BenchOptions& options);

/// Versioned JSON ("report_version": 1); byte-identical for identical
/// reports.
std::string ReportToJson(const BenchReport& report);
/// Human-readable table.
std::string ReportToTable(const BenchReport& report);

}  // namespace kaas

#endif  // KAAS_BENCH_H_
