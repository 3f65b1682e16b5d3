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

#ifndef KAAS_TIMING_H_
#define KAAS_TIMING_H_

#include <cstdint>
#include <string_view>

#include "kaas/virtual_time.h"

namespace kaas {

/// Simulated device costs. Bandwidths in bytes per virtual second, latencies
/// in virtual seconds, `flop_rate` in fused multiply-adds per virtual second.
/// Defaults are PCIe-class magnitudes.
struct TimingModel {
  double h2d_bandwidth = 12.0 * 1024 * 1024 * 1024;
  double d2h_bandwidth = 12.0 * 1024 * 1024 * 1024;
  double fetch_latency = 200e-6;
  double launch_overhead = 10e-6;
  double flop_rate = 1e12;

  /// Throws kInvalidConfig unless every field is finite and > 0.
  void Validate() const;

  /// fetch_latency + bytes / h2d_bandwidth
  VirtualDuration FetchTime(std::uint64_t bytes) const;
  /// bytes / d2h_bandwidth
  VirtualDuration FlushTime(std::uint64_t bytes) const;
  VirtualDuration LaunchOverhead() const;
  /// fma_count / flop_rate
  VirtualDuration ComputeTime(std::uint64_t fma_count) const;
};

/// JSON object with any subset of the five fields; missing fields keep
/// their defaults, unknown fields are rejected. Throws kInvalidConfig.
TimingModel ParseTimingModel(std::string_view json);
TimingModel LoadTimingModel(const std::string& path);

}  // namespace kaas

#endif  // KAAS_TIMING_H_
