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

#include "kaas/fleet.h"

#include <condition_variable>
#include <deque>
#include <future>
#include <thread>

#include "kaas/error.h"

namespace kaas {

void FleetConfig::Validate() const {
  if (executors == 0) {
    throw KaasError(ErrorKind::kInvalidConfig, "executor count must be >= 1");
  }
  if (capacity == 0) {
    throw KaasError(ErrorKind::kInvalidConfig, "capacity must be > 0");
  }
  if (digest_cap == 0) {
    throw KaasError(ErrorKind::kInvalidConfig, "digest cap must be >= 1");
  }
  timing.Validate();
}

class Fleet::Worker {
 public:
  explicit Worker(std::unique_ptr<Executor> executor)
      : executor_(std::move(executor)),
        stats_(executor_->stats()),
        thread_([this] { Loop(); }) {}

  ~Worker() {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
    }
    cv_.notify_one();
    thread_.join();
  }

  std::future<KaasResponse> Enqueue(const KaasRequest& req) {
    // The snapshot is refreshed before the future is ready, so a caller that
    // has its response also sees it counted in `stats()`.
    std::packaged_task<KaasResponse()> task([this, &req] {
      KaasResponse resp = executor_->Execute(req);
      std::lock_guard lock(mu_);
      stats_ = executor_->stats();
      return resp;
    });
    auto future = task.get_future();
    {
      std::lock_guard lock(mu_);
      queue_.push_back(std::move(task));
    }
    cv_.notify_one();
    return future;
  }

  ExecutorStats stats() const {
    std::lock_guard lock(mu_);
    return stats_;
  }

 private:
  void Loop() {
    for (;;) {
      std::packaged_task<KaasResponse()> task;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
        if (queue_.empty()) return;
        task = std::move(queue_.front());
        queue_.pop_front();
      }
      task();
    }
  }

  std::unique_ptr<Executor> executor_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::packaged_task<KaasResponse()>> queue_;
  ExecutorStats stats_;
  bool stopping_ = false;
  std::thread thread_;
};

Fleet::Fleet(FleetConfig config, std::shared_ptr<ObjectStore> store,
             std::shared_ptr<const KernelRegistry> registry)
    : config_(config),
      store_(std::move(store)),
      router_(config.executors, config.policy, config.digest_cap) {
  config_.Validate();
  if (!registry) {
    registry = std::make_shared<const KernelRegistry>(
        KernelRegistry::WithBuiltins());
  }
  for (std::size_t i = 0; i < config_.executors; ++i) {
    ExecutorConfig ec{i, config_.capacity, config_.timing};
    workers_.push_back(
        std::make_unique<Worker>(MakeSimulatedExecutor(ec, store_, registry)));
  }
}

Fleet::~Fleet() = default;

KaasResponse Fleet::Submit(const KaasRequest& req, ExecutorId* placed) {
  if (auto violations = ValidateRequest(req); !violations.empty()) {
    return KaasResponse::Failure(req.request_id, ErrorKind::kInvalidRequest,
                                 DescribeViolations(violations));
  }
  ExecutorId id;
  {
    std::lock_guard lock(routing_mu_);
    id = router_.Route(req);
  }
  if (placed != nullptr) *placed = id;
  KaasResponse resp = workers_[id]->Enqueue(req).get();
  {
    std::lock_guard lock(routing_mu_);
    router_.UpdateDigest(id, req, resp);
  }
  return resp;
}

std::vector<ExecutorStats> Fleet::Stats() const {
  std::vector<ExecutorStats> out;
  for (const auto& w : workers_) out.push_back(w->stats());
  return out;
}

}  // namespace kaas
