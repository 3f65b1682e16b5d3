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

#ifndef KAAS_FLEET_H_
#define KAAS_FLEET_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include "kaas/backend.h"
#include "kaas/executor.h"
#include "kaas/object_store.h"
#include "kaas/protocol.h"
#include "kaas/router.h"
#include "kaas/timing.h"

namespace kaas {

struct FleetConfig {
  std::size_t executors = 1;
  std::uint64_t capacity = 0;
  TimingModel timing;
  RoutingPolicy policy = RoutingPolicy::Affinity(8);
  std::size_t digest_cap = 1024;

  /// Throws kInvalidConfig.
  void Validate() const;
};

/// A router in front of executors that each drain their own FIFO queue on a
/// dedicated thread. `Submit` may be called from any number of threads; the
/// routing lock is held only while placing and while updating digests.
class Fleet {
 public:
  Fleet(FleetConfig config, std::shared_ptr<ObjectStore> store,
        std::shared_ptr<const KernelRegistry> registry = nullptr);
  ~Fleet();

  Fleet(const Fleet&) = delete;
  Fleet& operator=(const Fleet&) = delete;

  /// Blocks until the request has run. Invalid requests are rejected before
  /// routing. `placed` receives the executor id when the request was routed.
  KaasResponse Submit(const KaasRequest& req, ExecutorId* placed = nullptr);

  /// Per-executor snapshot, taken between requests.
  std::vector<ExecutorStats> Stats() const;

  std::size_t executor_count() const { return workers_.size(); }
  const FleetConfig& config() const { return config_; }
  ObjectStore& store() { return *store_; }
  std::shared_ptr<ObjectStore> shared_store() const { return store_; }

 private:
  class Worker;

  FleetConfig config_;
  std::shared_ptr<ObjectStore> store_;
  std::mutex routing_mu_;
  Router router_;
  std::vector<std::unique_ptr<Worker>> workers_;
};

}  // namespace kaas

#endif  // KAAS_FLEET_H_
