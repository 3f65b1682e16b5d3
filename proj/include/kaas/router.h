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

#ifndef KAAS_ROUTER_H_
#define KAAS_ROUTER_H_

#include <cstddef>
#include <cstdint>
#include <list>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kaas/executor.h"
#include "kaas/protocol.h"

namespace kaas {

struct RoutingPolicy {
  enum class Kind { kRandom, kRoundRobin, kAffinity };

  Kind kind = Kind::kRoundRobin;
  std::uint64_t seed = 0;
  /// Affinity spill threshold: an executor whose queue is deeper than this
  /// is passed over for the least-loaded one.
  std::size_t q_max = 1;

  static RoutingPolicy Random(std::uint64_t seed) {
    return {Kind::kRandom, seed, 1};
  }
  static RoutingPolicy RoundRobin() { return {Kind::kRoundRobin, 0, 1}; }
  static RoutingPolicy Affinity(std::size_t q_max) {
    return {Kind::kAffinity, 0, q_max};
  }

  /// "random:<seed>", "rr" or "affinity:<q_max>".
  std::string ToString() const;
};

/// Parses the `ToString` forms. Throws kInvalidConfig.
RoutingPolicy ParseRoutingPolicy(std::string_view spec);

/// Router-side estimate of one executor's cache contents and load. Only ever
/// used to rank executors; a stale digest costs hit rate, not correctness.
class ExecutorDigest {
 public:
  bool Contains(std::string_view key) const;
  /// 0 when absent.
  std::uint64_t SizeOf(std::string_view key) const;

  /// Records `key` as most recently seen, then drops the oldest keys until at
  /// most `cap` remain.
  void Add(const std::string& key, std::uint64_t size, std::size_t cap);

  /// Oldest first.
  std::vector<std::string> Keys() const;
  std::size_t key_count() const { return index_.size(); }
  std::uint64_t used_bytes() const { return used_bytes_; }

  std::size_t queue_depth = 0;

 private:
  std::list<std::string> order_;
  std::unordered_map<std::string,
                     std::pair<std::uint64_t, std::list<std::string>::iterator>>
      index_;
  std::uint64_t used_bytes_ = 0;
};

/// Affinity placement: maximize the bytes of the request's const inputs
/// already in an executor's digest; ties go to the shallower queue, then the
/// lower id. If the winner's queue is deeper than `q_max`, the least-loaded
/// executor (lowest id on ties) is chosen instead.
ExecutorId ChooseAffinity(const KaasRequest& req,
                          std::span<const ExecutorDigest> digests,
                          std::size_t q_max);

/// Places requests on executors and maintains their digests. Not
/// synchronized; callers serialize `Route` and `UpdateDigest`.
class Router {
 public:
  /// Throws kInvalidConfig on q_max == 0 or digest_cap == 0.
  Router(std::size_t executors, RoutingPolicy policy, std::size_t digest_cap);

  /// Picks an executor and counts the request in its queue depth. Throws
  /// kNoExecutors when the fleet is empty.
  ExecutorId Route(const KaasRequest& req);

  /// Completes a routed request: on ok responses, adds the request's const
  /// and output keys to the digest; always decrements the queue depth.
  /// Throws kUnknownExecutor.
  void UpdateDigest(ExecutorId id, const KaasRequest& req,
                    const KaasResponse& resp);

  std::size_t executor_count() const { return digests_.size(); }
  const RoutingPolicy& policy() const { return policy_; }
  std::size_t digest_cap() const { return digest_cap_; }
  const ExecutorDigest& digest(ExecutorId id) const;
  ExecutorDigest& mutable_digest(ExecutorId id);

 private:
  RoutingPolicy policy_;
  std::size_t digest_cap_;
  std::vector<ExecutorDigest> digests_;
  std::mt19937_64 rng_;
  std::size_t next_ = 0;
};

}  // namespace kaas

#endif  // KAAS_ROUTER_H_
