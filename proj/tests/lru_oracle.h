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

#ifndef KAAS_TESTS_LRU_ORACLE_H_
#define KAAS_TESTS_LRU_ORACLE_H_

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kaas/device_cache.h"
#include "kaas/error.h"

namespace kaas::testing {

// Straight-line model of the eviction rules: a recency list, front is
// least recently used. No ticks, no index.
class LruOracle {
 public:
  struct Item {
    std::string key;
    std::uint64_t size;
    int pins = 0;
    bool dirty = false;
  };

  explicit LruOracle(std::uint64_t capacity) : capacity_(capacity) {}

  std::uint64_t used() const {
    std::uint64_t u = 0;
    for (const auto& i : items_) u += i.size;
    return u;
  }
  Item* Find(const std::string& key) {
    for (auto& i : items_)
      if (i.key == key) return &i;
    return nullptr;
  }
  void Touch(const std::string& key) {
    auto it = std::find_if(items_.begin(), items_.end(),
                           [&](const Item& i) { return i.key == key; });
    Item moved = *it;
    items_.erase(it);
    items_.push_back(moved);
  }
  // Returns false (and changes nothing) when room cannot be made.
  bool EvictUntil(std::uint64_t needed, std::vector<std::string>& evicted) {
    std::uint64_t free = capacity_ - used();
    std::uint64_t reclaimable = 0;
    for (const auto& i : items_)
      if (i.pins == 0 && !i.dirty) reclaimable += i.size;
    if (free + reclaimable < needed) return false;
    for (std::size_t k = 0; k < items_.size() && free < needed;) {
      if (items_[k].pins == 0 && !items_[k].dirty) {
        free += items_[k].size;
        evicted.push_back(items_[k].key);
        items_.erase(items_.begin() + static_cast<std::ptrdiff_t>(k));
      } else {
        ++k;
      }
    }
    return true;
  }
  void Insert(const std::string& key, std::uint64_t size) {
    items_.push_back({key, size});
  }
  void Erase(const std::string& key) {
    std::erase_if(items_, [&](const Item& i) { return i.key == key; });
  }
  std::vector<std::string> Keys() const {
    std::vector<std::string> k;
    for (const auto& i : items_) k.push_back(i.key);
    return k;
  }

 private:
  std::uint64_t capacity_;
  std::vector<Item> items_;
};

struct LruStep {
  std::vector<std::string> recency;
  std::vector<std::string> evicted;
  bool oom = false;
  friend bool operator==(const LruStep&, const LruStep&) = default;
};

struct LruReplay {
  std::vector<LruStep> cache;
  std::vector<LruStep> oracle;
  bool invariants_ok = true;
};

// Drives DeviceCache and the oracle through the same random access /
// pin / unpin / dirty / clean / erase script.
inline LruReplay ReplayLruTrace(std::uint64_t seed, int steps,
                                std::uint64_t capacity = 128) {
  std::mt19937_64 rng(seed);
  DeviceCache cache(capacity);
  LruOracle oracle(capacity);
  LruReplay out;
  for (int s = 0; s < steps; ++s) {
    const std::string key = "k" + std::to_string(rng() % 8);
    const std::uint64_t size = 8 * (1 + rng() % 4);
    const int op = static_cast<int>(rng() % 10);
    LruStep a, b;
    CacheEntry* e = cache.Find(key);
    LruOracle::Item* o = oracle.Find(key);
    if (op < 5) {  // access
      if (e != nullptr) {
        cache.Touch(*e);
        oracle.Touch(key);
      } else {
        try {
          cache.EvictUntil(size, &a.evicted);
          cache.Insert(key, size, false);
        } catch (const KaasError& err) {
          a.oom = err.kind() == ErrorKind::kOutOfDeviceMemory;
        }
        if (oracle.EvictUntil(size, b.evicted)) {
          oracle.Insert(key, size);
        } else {
          b.oom = true;
        }
      }
    } else if (op == 5 && e != nullptr) {
      cache.Pin(*e);
      ++o->pins;
    } else if (op == 6 && e != nullptr && e->pinned > 0) {
      cache.Unpin(*e);
      --o->pins;
    } else if (op == 7 && e != nullptr) {
      e->dirty = !e->dirty;
      o->dirty = !o->dirty;
    } else if (op == 8 && e != nullptr && e->pinned == 0) {
      cache.Erase(key);
      oracle.Erase(key);
    } else if (op == 9) {
      const std::uint64_t needed = rng() % (capacity + 1);
      try {
        cache.EvictUntil(needed, &a.evicted);
      } catch (const KaasError& err) {
        a.oom = err.kind() == ErrorKind::kOutOfDeviceMemory;
      }
      b.oom = !oracle.EvictUntil(needed, b.evicted);
    }
    a.recency = cache.KeysByRecency();
    b.recency = oracle.Keys();
    if (cache.CheckInvariants().has_value() || cache.used_bytes() != oracle.used())
      out.invariants_ok = false;
    out.cache.push_back(std::move(a));
    out.oracle.push_back(std::move(b));
  }
  return out;
}

}  // namespace kaas::testing

#endif  // KAAS_TESTS_LRU_ORACLE_H_
