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

#ifndef KAAS_DEVICE_CACHE_H_
#define KAAS_DEVICE_CACHE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kaas {

/// A region of simulated device memory, zero-filled on creation and
/// surrounded by canary bytes that detect out-of-view writes.
class DeviceAllocation {
 public:
  explicit DeviceAllocation(std::uint64_t size);

  std::uint64_t size() const { return size_; }
  std::span<std::byte> bytes() {
    return {storage_.data() + kGuardBytes, static_cast<std::size_t>(size_)};
  }
  std::span<const std::byte> bytes() const {
    return {storage_.data() + kGuardBytes, static_cast<std::size_t>(size_)};
  }

  void ZeroFill();
  bool GuardsIntact() const;

 private:
  static constexpr std::size_t kGuardBytes = 16;
  static constexpr std::byte kCanary{0xA5};

  std::uint64_t size_;
  std::vector<std::byte> storage_;
};

struct CacheEntry {
  std::string key;
  DeviceAllocation memory;
  std::uint32_t pinned = 0;
  /// Device contents newer than the store.
  bool dirty = false;
  bool is_const = false;
  std::uint64_t last_use = 0;

  std::uint64_t size() const { return memory.size(); }
  bool Evictable() const { return pinned == 0 && !dirty; }
};

/// Byte-bounded device buffer cache keyed by store key, with LRU eviction
/// over unique logical ticks. Also accounts for request-scoped ephemeral
/// allocations, which share the capacity but are not keyed.
///
/// Invariants (checked by `CheckInvariants`):
///   used_bytes == sum of entry sizes
///   used_bytes + ephemeral_bytes <= capacity
///   the LRU index holds exactly one tick per entry
class DeviceCache {
 public:
  explicit DeviceCache(std::uint64_t capacity);

  DeviceCache(const DeviceCache&) = delete;
  DeviceCache& operator=(const DeviceCache&) = delete;

  std::uint64_t capacity() const { return capacity_; }
  std::uint64_t used_bytes() const { return used_bytes_; }
  std::uint64_t ephemeral_bytes() const { return ephemeral_bytes_; }
  std::uint64_t free_bytes() const {
    return capacity_ - used_bytes_ - ephemeral_bytes_;
  }
  std::size_t entry_count() const { return entries_.size(); }
  std::uint64_t tick() const { return tick_; }

  CacheEntry* Find(std::string_view key);
  const CacheEntry* Find(std::string_view key) const;

  /// Inserts a zero-filled, clean, unpinned entry stamped with a fresh tick.
  /// The key must be absent. Throws kOutOfDeviceMemory if `size` exceeds
  /// `free_bytes()`; callers run `EvictUntil` first.
  CacheEntry& Insert(std::string key, std::uint64_t size, bool is_const);

  /// Stamps a fresh tick.
  void Touch(CacheEntry& entry);

  void Pin(CacheEntry& entry) { ++entry.pinned; }
  void Unpin(CacheEntry& entry);

  /// Removes an unpinned entry. No-op for absent keys.
  void Erase(std::string_view key);

  /// Evicts clean, unpinned entries in ascending last-use order until
  /// `free_bytes() >= needed`. Returns the bytes freed. When even evicting
  /// every candidate would not make room, evicts nothing and throws
  /// kOutOfDeviceMemory. Evicted keys are appended to `evicted` if given.
  std::uint64_t EvictUntil(std::uint64_t needed,
                           std::vector<std::string>* evicted = nullptr);

  /// Ephemeral allocations must fit in `free_bytes()` (kOutOfDeviceMemory).
  void ReserveEphemeral(std::uint64_t size);
  void ReleaseEphemeral(std::uint64_t size);

  /// Keys from least to most recently used.
  std::vector<std::string> KeysByRecency() const;
  std::vector<const CacheEntry*> Entries() const;

  /// Description of the first broken accounting invariant, if any.
  std::optional<std::string> CheckInvariants() const;

 private:
  std::uint64_t capacity_;
  std::uint64_t used_bytes_ = 0;
  std::uint64_t ephemeral_bytes_ = 0;
  std::uint64_t tick_ = 0;
  std::map<std::string, std::unique_ptr<CacheEntry>, std::less<>> entries_;
  std::map<std::uint64_t, CacheEntry*> lru_;
};

}  // namespace kaas

#endif  // KAAS_DEVICE_CACHE_H_
