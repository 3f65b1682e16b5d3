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

#ifndef KAAS_EXECUTOR_H_
#define KAAS_EXECUTOR_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string_view>

#include "kaas/backend.h"
#include "kaas/device_cache.h"
#include "kaas/object_store.h"
#include "kaas/protocol.h"
#include "kaas/timing.h"
#include "kaas/virtual_time.h"

namespace kaas {

using ExecutorId = std::size_t;

struct ExecutorConfig {
  ExecutorId executor_id = 0;
  /// Device memory in bytes; must be > 0.
  std::uint64_t capacity = 0;
  TimingModel timing;
};

struct ExecutorStats {
  ExecutorId executor_id = 0;
  std::uint64_t used_bytes = 0;
  std::size_t entries = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t requests = 0;
  VirtualDuration busy_time{0};
  VirtualDuration compute_time{0};
};

/// Owns one simulated device: its buffer cache, backend and virtual clock.
/// Runs one request at a time; not safe for concurrent use.
///
/// Request lifecycle: validate, check every invocation against the kernel
/// signatures, resolve buffers in table order, launch invocations in list
/// order, then write every written non-ephemeral buffer back to the store.
/// Nothing reaches the store unless all invocations succeed.
class Executor {
 public:
  /// Called after every internal step with a short step label.
  using StepHook = std::function<void(const DeviceCache&, std::string_view)>;

  /// Throws kInvalidConfig on zero capacity or an invalid timing model.
  Executor(ExecutorConfig config, std::shared_ptr<ObjectStore> store,
           std::unique_ptr<Backend> backend);

  /// Never throws for request-level failures; they come back as an error
  /// response.
  KaasResponse Execute(const KaasRequest& req);

  ExecutorId id() const { return config_.executor_id; }
  const ExecutorConfig& config() const { return config_; }
  const DeviceCache& cache() const { return cache_; }
  DeviceCache& mutable_cache() { return cache_; }
  VirtualDuration now() const { return clock_.now(); }
  const ExecutorStats& stats() const { return stats_; }

  void set_step_hook(StepHook hook) { step_hook_ = std::move(hook); }

 private:
  class RequestScope;

  void Run(const KaasRequest& req, RequestScope& scope, KaasResponse& resp);
  void Step(std::string_view label) const;

  ExecutorConfig config_;
  std::shared_ptr<ObjectStore> store_;
  std::unique_ptr<Backend> backend_;
  DeviceCache cache_;
  VirtualClock clock_;
  ExecutorStats stats_;
  StepHook step_hook_;
};

/// An executor over a `SimulatedBackend` with the builtin kernels.
std::unique_ptr<Executor> MakeSimulatedExecutor(
    ExecutorConfig config, std::shared_ptr<ObjectStore> store,
    std::shared_ptr<const KernelRegistry> registry = nullptr);

}  // namespace kaas

#endif  // KAAS_EXECUTOR_H_
