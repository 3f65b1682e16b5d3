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

#include "kaas/device_cache.h"

#include <algorithm>

#include "kaas/error.h"

namespace kaas {

DeviceAllocation::DeviceAllocation(std::uint64_t size)
    : size_(size), storage_(static_cast<std::size_t>(size) + 2 * kGuardBytes) {
  std::fill_n(storage_.begin(), kGuardBytes, kCanary);
  std::fill_n(storage_.end() - kGuardBytes, kGuardBytes, kCanary);
}

void DeviceAllocation::ZeroFill() {
  auto b = bytes();
  std::fill(b.begin(), b.end(), std::byte{0});
}

bool DeviceAllocation::GuardsIntact() const {
  auto is_canary = [](std::byte b) { return b == kCanary; };
  return std::all_of(storage_.begin(), storage_.begin() + kGuardBytes,
                     is_canary) &&
         std::all_of(storage_.end() - kGuardBytes, storage_.end(), is_canary);
}

namespace {

[[noreturn]] void OutOfMemory(std::uint64_t needed, std::uint64_t available) {
  throw KaasError(ErrorKind::kOutOfDeviceMemory,
                  "need " + std::to_string(needed) + " bytes, " +
                      std::to_string(available) + " obtainable");
}

}  // namespace

DeviceCache::DeviceCache(std::uint64_t capacity) : capacity_(capacity) {}

CacheEntry* DeviceCache::Find(std::string_view key) {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : it->second.get();
}

const CacheEntry* DeviceCache::Find(std::string_view key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : it->second.get();
}

CacheEntry& DeviceCache::Insert(std::string key, std::uint64_t size,
                                bool is_const) {
  if (size > free_bytes()) OutOfMemory(size, free_bytes());
  auto entry = std::make_unique<CacheEntry>(
      CacheEntry{key, DeviceAllocation(size), 0, false, is_const, ++tick_});
  CacheEntry& ref = *entry;
  auto [it, inserted] = entries_.emplace(std::move(key), std::move(entry));
  if (!inserted) {
    throw std::logic_error("cache key inserted twice: " + it->first);
  }
  lru_.emplace(ref.last_use, &ref);
  used_bytes_ += size;
  return ref;
}

void DeviceCache::Touch(CacheEntry& entry) {
  lru_.erase(entry.last_use);
  entry.last_use = ++tick_;
  lru_.emplace(entry.last_use, &entry);
}

void DeviceCache::Unpin(CacheEntry& entry) {
  if (entry.pinned == 0) throw std::logic_error("unpin of unpinned entry");
  --entry.pinned;
}

void DeviceCache::Erase(std::string_view key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return;
  if (it->second->pinned != 0) {
    throw std::logic_error("erase of pinned entry " + it->first);
  }
  lru_.erase(it->second->last_use);
  used_bytes_ -= it->second->size();
  entries_.erase(it);
}

std::uint64_t DeviceCache::EvictUntil(std::uint64_t needed,
                                      std::vector<std::string>* evicted) {
  if (free_bytes() >= needed) return 0;
  std::uint64_t reclaimable = 0;
  for (const auto& [tick, entry] : lru_) {
    if (entry->Evictable()) reclaimable += entry->size();
  }
  if (free_bytes() + reclaimable < needed) {
    OutOfMemory(needed, free_bytes() + reclaimable);
  }
  std::uint64_t freed = 0;
  for (auto it = lru_.begin(); free_bytes() < needed;) {
    CacheEntry* victim = it->second;
    ++it;
    if (!victim->Evictable()) continue;
    freed += victim->size();
    if (evicted != nullptr) evicted->push_back(victim->key);
    Erase(victim->key);
  }
  return freed;
}

void DeviceCache::ReserveEphemeral(std::uint64_t size) {
  if (size > free_bytes()) OutOfMemory(size, free_bytes());
  ephemeral_bytes_ += size;
}

void DeviceCache::ReleaseEphemeral(std::uint64_t size) {
  if (size > ephemeral_bytes_) {
    throw std::logic_error("ephemeral release exceeds reservation");
  }
  ephemeral_bytes_ -= size;
}

std::vector<std::string> DeviceCache::KeysByRecency() const {
  std::vector<std::string> keys;
  keys.reserve(lru_.size());
  for (const auto& [tick, entry] : lru_) keys.push_back(entry->key);
  return keys;
}

std::vector<const CacheEntry*> DeviceCache::Entries() const {
  std::vector<const CacheEntry*> out;
  out.reserve(entries_.size());
  for (const auto& [key, entry] : entries_) out.push_back(entry.get());
  return out;
}

std::optional<std::string> DeviceCache::CheckInvariants() const {
  std::uint64_t sum = 0;
  for (const auto& [key, entry] : entries_) {
    sum += entry->size();
    auto it = lru_.find(entry->last_use);
    if (it == lru_.end() || it->second != entry.get()) {
      return "entry " + key + " missing from LRU index";
    }
    if (!entry->memory.GuardsIntact()) {
      return "entry " + key + " has corrupted guard bytes";
    }
  }
  if (lru_.size() != entries_.size()) return "LRU index size mismatch";
  if (sum != used_bytes_) {
    return "used_bytes " + std::to_string(used_bytes_) + " != sum " +
           std::to_string(sum);
  }
  if (used_bytes_ + ephemeral_bytes_ > capacity_) {
    return "capacity exceeded: " + std::to_string(used_bytes_) + " + " +
           std::to_string(ephemeral_bytes_) + " > " + std::to_string(capacity_);
  }
  return std::nullopt;
}

}  // namespace kaas
