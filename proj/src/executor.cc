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

#include "kaas/executor.h"

#include <algorithm>
#include <string>
#include <vector>

#include "kaas/error.h"

namespace kaas {
namespace {

struct Binding {
  const BufferArg* arg = nullptr;
  CacheEntry* entry = nullptr;
  std::unique_ptr<DeviceAllocation> ephemeral;
  std::uint64_t reserved = 0;
  bool written = false;

  DeviceAllocation& memory() { return entry ? entry->memory : *ephemeral; }
};

[[noreturn]] void SizeMismatch(const BufferArg& arg, std::uint64_t actual) {
  throw KaasError(ErrorKind::kSizeMismatch,
                  "buffer " + arg.name + " declares " +
                      std::to_string(arg.size) + " bytes but key " + *arg.key +
                      " holds " + std::to_string(actual));
}

[[noreturn]] void Busy(const BufferArg& arg) {
  throw KaasError(ErrorKind::kBufferBusy,
                  "buffer " + arg.name + " (key " + *arg.key +
                      ") is pinned by another request");
}

}  // namespace

// Holds the pins and ephemeral reservations of one request and releases
// them on every exit path. Unless committed, entries the request may have
// modified (outputs and inouts) are dropped, since their device contents
// no longer match the store.
class Executor::RequestScope {
 public:
  explicit RequestScope(DeviceCache& cache) : cache_(cache) {}
  RequestScope(const RequestScope&) = delete;
  RequestScope& operator=(const RequestScope&) = delete;

  ~RequestScope() {
    for (auto& b : bindings_) {
      if (b.entry != nullptr) {
        cache_.Unpin(*b.entry);
      } else if (b.reserved != 0) {
        cache_.ReleaseEphemeral(b.reserved);
      }
    }
    for (auto& b : bindings_) {
      if (b.entry == nullptr || b.arg->direction == Direction::kInput) continue;
      const bool drop = !committed_ || (b.arg->direction == Direction::kOutput &&
                                        !b.written);
      // Only const buffers share a key, so this entry has no other binding.
      if (drop && b.entry->pinned == 0) {
        b.entry->dirty = false;
        const std::string key = b.entry->key;
        b.entry = nullptr;
        cache_.Erase(key);
      }
    }
  }

  Binding& Add(const BufferArg& arg) {
    Binding& b = bindings_.emplace_back();
    b.arg = &arg;
    return b;
  }

  Binding& Get(std::string_view name) {
    for (auto& b : bindings_) {
      if (b.arg->name == name) return b;
    }
    throw std::logic_error("unbound buffer " + std::string(name));
  }

  std::vector<Binding>& bindings() { return bindings_; }
  void Commit() { committed_ = true; }

 private:
  DeviceCache& cache_;
  std::vector<Binding> bindings_;
  bool committed_ = false;
};

Executor::Executor(ExecutorConfig config, std::shared_ptr<ObjectStore> store,
                   std::unique_ptr<Backend> backend)
    : config_(config),
      store_(std::move(store)),
      backend_(std::move(backend)),
      cache_(config.capacity) {
  if (config_.capacity == 0) {
    throw KaasError(ErrorKind::kInvalidConfig, "executor capacity must be > 0");
  }
  config_.timing.Validate();
  stats_.executor_id = config_.executor_id;
}

void Executor::Step(std::string_view label) const {
  if (step_hook_) step_hook_(cache_, label);
}

KaasResponse Executor::Execute(const KaasRequest& req) {
  if (auto violations = ValidateRequest(req); !violations.empty()) {
    return KaasResponse::Failure(req.request_id, ErrorKind::kInvalidRequest,
                                 DescribeViolations(violations));
  }
  KaasResponse resp;
  resp.request_id = req.request_id;
  const VirtualDuration start = clock_.now();
  try {
    RequestScope scope(cache_);
    // Bindings hold pointers into the scope's vector.
    scope.bindings().reserve(req.buffers.size());
    Run(req, scope, resp);
  } catch (const KaasError& e) {
    resp.error = ResponseError{e.kind(), e.what()};
  }
  Step("release");
  resp.simulated_total_time = clock_.now() - start;

  ++stats_.requests;
  stats_.cache_hits += resp.io_stats.cache_hits;
  stats_.cache_misses += resp.io_stats.cache_misses;
  stats_.used_bytes = cache_.used_bytes();
  stats_.entries = cache_.entry_count();
  stats_.busy_time += resp.simulated_total_time;
  for (const auto& t : resp.per_invocation) {
    stats_.compute_time += t.simulated_compute_time;
  }
  return resp;
}

void Executor::Run(const KaasRequest& req, RequestScope& scope,
                   KaasResponse& resp) {
  IoStats& io = resp.io_stats;

  // Reject kernel-level problems before touching the store.
  for (const auto& inv : req.invocations) {
    const KernelSignature* sig = backend_->Signature(inv.kernel_id);
    if (sig == nullptr) {
      throw KaasError(ErrorKind::kUnknownKernel,
                      "unknown kernel \"" + inv.kernel_id + "\"");
    }
    CheckArity(inv.kernel_id, *sig, inv.literals, inv.args.size());
    for (std::size_t i = 0; i < inv.args.size(); ++i) {
      const BufferArg* arg = req.FindBuffer(inv.args[i]);
      if (Writes(sig->buffers[i]) && !arg->is_ephemeral &&
          arg->direction == Direction::kInput) {
        throw KaasError(ErrorKind::kInvalidRequest,
                        "kernel \"" + inv.kernel_id + "\" writes input buffer " +
                            arg->name);
      }
    }
  }

  auto fetch = [&](const BufferArg& arg) {
    Bytes data = store_->Get(*arg.key);
    ++io.store_gets;
    io.bytes_fetched += data.size();
    clock_.Advance(config_.timing.FetchTime(data.size()));
    if (data.size() != arg.size) SizeMismatch(arg, data.size());
    return data;
  };

  for (const BufferArg& arg : req.buffers) {
    Binding& b = scope.Add(arg);
    if (arg.is_ephemeral) {
      cache_.EvictUntil(arg.size);
      cache_.ReserveEphemeral(arg.size);
      b.reserved = arg.size;
      b.ephemeral = std::make_unique<DeviceAllocation>(arg.size);
    } else if (arg.is_const) {
      if (CacheEntry* e = cache_.Find(*arg.key)) {
        if (e->size() != arg.size) SizeMismatch(arg, e->size());
        ++io.cache_hits;
        cache_.Touch(*e);
        cache_.Pin(*e);
        b.entry = e;
      } else {
        ++io.cache_misses;
        const Bytes data = fetch(arg);
        cache_.EvictUntil(arg.size);
        CacheEntry& fresh = cache_.Insert(*arg.key, arg.size, true);
        std::copy(data.begin(), data.end(), fresh.memory.bytes().begin());
        cache_.Pin(fresh);
        b.entry = &fresh;
      }
    } else {
      CacheEntry* e = cache_.Find(*arg.key);
      if (e != nullptr && e->pinned != 0) Busy(arg);
      Bytes data;
      if (arg.direction == Direction::kOutput) {
        if (e != nullptr && e->size() == arg.size) {
          ++io.cache_hits;
        } else {
          ++io.cache_misses;
        }
      } else {
        ++io.cache_misses;
        data = fetch(arg);
      }
      if (e != nullptr && e->size() != arg.size) {
        cache_.Erase(*arg.key);
        e = nullptr;
      }
      if (e == nullptr) {
        cache_.EvictUntil(arg.size);
        e = &cache_.Insert(*arg.key, arg.size, false);
      } else {
        cache_.Touch(*e);
      }
      cache_.Pin(*e);
      b.entry = e;
      e->is_const = false;
      if (arg.direction == Direction::kOutput) {
        e->memory.ZeroFill();
      } else {
        std::copy(data.begin(), data.end(), e->memory.bytes().begin());
      }
    }
    Step("resolve");
  }

  std::vector<std::span<std::byte>> views;
  for (const auto& inv : req.invocations) {
    views.clear();
    for (const auto& name : inv.args) {
      views.push_back(scope.Get(name).memory().bytes());
    }
    const VirtualDuration overhead = config_.timing.LaunchOverhead();
    clock_.Advance(overhead);
    const LaunchResult result =
        backend_->Launch(inv.kernel_id, inv.dims, inv.literals, views);
    clock_.Advance(result.compute_time);
    resp.per_invocation.push_back(
        InvocationTiming{inv.kernel_id, result.compute_time, overhead});

    const KernelSignature& sig = *backend_->Signature(inv.kernel_id);
    for (std::size_t i = 0; i < inv.args.size(); ++i) {
      Binding& b = scope.Get(inv.args[i]);
      if (Writes(sig.buffers[i])) b.written = true;
#ifndef NDEBUG
      if (!b.memory().GuardsIntact()) {
        throw KaasError(ErrorKind::kBackendFault,
                        "kernel \"" + inv.kernel_id +
                            "\" wrote outside buffer " + b.arg->name);
      }
#endif
    }
    Step("launch");
  }

  // Write back every written non-ephemeral buffer exactly once.
  for (auto& b : scope.bindings()) {
    if (b.entry != nullptr && b.written) b.entry->dirty = true;
  }
  Step("dirty");
  for (auto& b : scope.bindings()) {
    if (b.entry == nullptr || !b.written) continue;
    const auto bytes = b.entry->memory.bytes();
    store_->Put(*b.arg->key, bytes);
    ++io.store_puts;
    io.bytes_flushed += bytes.size();
    clock_.Advance(config_.timing.FlushTime(bytes.size()));
    b.entry->dirty = false;
    Step("flush");
  }
  scope.Commit();
}

std::unique_ptr<Executor> MakeSimulatedExecutor(
    ExecutorConfig config, std::shared_ptr<ObjectStore> store,
    std::shared_ptr<const KernelRegistry> registry) {
  if (!registry) {
    registry = std::make_shared<const KernelRegistry>(
        KernelRegistry::WithBuiltins());
  }
  auto backend = std::make_unique<SimulatedBackend>(std::move(registry),
                                                    config.timing);
  return std::make_unique<Executor>(config, std::move(store),
                                    std::move(backend));
}

}  // namespace kaas
