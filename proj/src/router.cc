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

#include "kaas/router.h"

#include <charconv>
#include <set>

#include "kaas/error.h"

namespace kaas {

std::string RoutingPolicy::ToString() const {
  switch (kind) {
    case Kind::kRandom:
      return "random:" + std::to_string(seed);
    case Kind::kRoundRobin:
      return "rr";
    case Kind::kAffinity:
      return "affinity:" + std::to_string(q_max);
  }
  return "rr";
}

RoutingPolicy ParseRoutingPolicy(std::string_view spec) {
  auto number = [&](std::string_view text) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
      throw KaasError(ErrorKind::kInvalidConfig,
                      "bad number in policy \"" + std::string(spec) + "\"");
    }
    return v;
  };
  if (spec == "rr") return RoutingPolicy::RoundRobin();
  if (spec.starts_with("random:")) {
    return RoutingPolicy::Random(number(spec.substr(7)));
  }
  if (spec.starts_with("affinity:")) {
    const auto q = number(spec.substr(9));
    if (q < 1) {
      throw KaasError(ErrorKind::kInvalidConfig, "affinity q_max must be >= 1");
    }
    return RoutingPolicy::Affinity(q);
  }
  throw KaasError(ErrorKind::kInvalidConfig,
                  "policy must be random:<seed>, rr or affinity:<q_max>, got \"" +
                      std::string(spec) + "\"");
}

bool ExecutorDigest::Contains(std::string_view key) const {
  return index_.count(std::string(key)) != 0;
}

std::uint64_t ExecutorDigest::SizeOf(std::string_view key) const {
  auto it = index_.find(std::string(key));
  return it == index_.end() ? 0 : it->second.first;
}

void ExecutorDigest::Add(const std::string& key, std::uint64_t size,
                         std::size_t cap) {
  if (auto it = index_.find(key); it != index_.end()) {
    used_bytes_ -= it->second.first;
    order_.erase(it->second.second);
    index_.erase(it);
  }
  order_.push_back(key);
  index_.emplace(key, std::make_pair(size, std::prev(order_.end())));
  used_bytes_ += size;
  while (index_.size() > cap) {
    auto oldest = index_.find(order_.front());
    used_bytes_ -= oldest->second.first;
    index_.erase(oldest);
    order_.pop_front();
  }
}

std::vector<std::string> ExecutorDigest::Keys() const {
  return {order_.begin(), order_.end()};
}

namespace {

// Workload generators also seed mt19937_64 with small integers. Mixing the
// router's seed (splitmix64 finalizer over a salted value) keeps "random:1"
// from replaying a workload's own stream, which would tie placement to the
// key drawn.
std::uint64_t RouterSeed(std::uint64_t seed) {
  std::uint64_t z = seed ^ 0x726f757465720000ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ExecutorId LeastLoaded(std::span<const ExecutorDigest> digests) {
  ExecutorId best = 0;
  for (ExecutorId e = 1; e < digests.size(); ++e) {
    if (digests[e].queue_depth < digests[best].queue_depth) best = e;
  }
  return best;
}

}  // namespace

ExecutorId ChooseAffinity(const KaasRequest& req,
                          std::span<const ExecutorDigest> digests,
                          std::size_t q_max) {
  // Distinct const keys, each with the size the request declares.
  std::vector<std::pair<std::string_view, std::uint64_t>> const_keys;
  std::set<std::string_view> seen;
  for (const auto& b : req.buffers) {
    if (b.is_const && b.key && seen.insert(*b.key).second) {
      const_keys.emplace_back(*b.key, b.size);
    }
  }

  ExecutorId best = 0;
  std::uint64_t best_score = 0;
  for (ExecutorId e = 0; e < digests.size(); ++e) {
    std::uint64_t score = 0;
    for (const auto& [key, size] : const_keys) {
      if (digests[e].Contains(key)) score += size;
    }
    const bool better =
        e == 0 || score > best_score ||
        (score == best_score &&
         digests[e].queue_depth < digests[best].queue_depth);
    if (better) {
      best = e;
      best_score = score;
    }
  }
  if (digests[best].queue_depth > q_max) return LeastLoaded(digests);
  return best;
}

Router::Router(std::size_t executors, RoutingPolicy policy,
               std::size_t digest_cap)
    : policy_(policy),
      digest_cap_(digest_cap),
      digests_(executors),
      rng_(RouterSeed(policy.seed)) {
  if (policy_.kind == RoutingPolicy::Kind::kAffinity && policy_.q_max < 1) {
    throw KaasError(ErrorKind::kInvalidConfig, "affinity q_max must be >= 1");
  }
  if (digest_cap_ == 0) {
    throw KaasError(ErrorKind::kInvalidConfig, "digest cap must be >= 1");
  }
}

ExecutorId Router::Route(const KaasRequest& req) {
  if (digests_.empty()) {
    throw KaasError(ErrorKind::kNoExecutors, "no executors registered");
  }
  ExecutorId chosen = 0;
  switch (policy_.kind) {
    case RoutingPolicy::Kind::kRandom:
      chosen = std::uniform_int_distribution<ExecutorId>(
          0, digests_.size() - 1)(rng_);
      break;
    case RoutingPolicy::Kind::kRoundRobin:
      chosen = next_++ % digests_.size();
      break;
    case RoutingPolicy::Kind::kAffinity:
      chosen = ChooseAffinity(req, digests_, policy_.q_max);
      break;
  }
  ++digests_[chosen].queue_depth;
  return chosen;
}

void Router::UpdateDigest(ExecutorId id, const KaasRequest& req,
                          const KaasResponse& resp) {
  ExecutorDigest& d = mutable_digest(id);
  if (resp.ok()) {
    for (const auto& b : req.buffers) {
      if (!b.key) continue;
      if (b.is_const || b.direction != Direction::kInput) {
        d.Add(*b.key, b.size, digest_cap_);
      }
    }
  }
  if (d.queue_depth > 0) --d.queue_depth;
}

const ExecutorDigest& Router::digest(ExecutorId id) const {
  if (id >= digests_.size()) {
    throw KaasError(ErrorKind::kUnknownExecutor,
                    "unknown executor " + std::to_string(id));
  }
  return digests_[id];
}

ExecutorDigest& Router::mutable_digest(ExecutorId id) {
  if (id >= digests_.size()) {
    throw KaasError(ErrorKind::kUnknownExecutor,
                    "unknown executor " + std::to_string(id));
  }
  return digests_[id];
}

}  // namespace kaas
