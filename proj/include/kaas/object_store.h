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

#ifndef KAAS_OBJECT_STORE_H_
#define KAAS_OBJECT_STORE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kaas/store_key.h"

namespace kaas {

using Bytes = std::vector<std::byte>;

/// Key-value store of binary objects shared between clients and executors.
///
/// Every operation validates its key (kInvalidKey). Operations on one key are
/// atomic with respect to each other; there is no ordering across keys.
/// Implementations must be safe for concurrent use.
class ObjectStore {
 public:
  virtual ~ObjectStore() = default;

  /// Last writer wins.
  virtual void Put(std::string_view key, std::span<const std::byte> payload) = 0;
  /// Throws kNotFound when absent.
  virtual Bytes Get(std::string_view key) const = 0;
  /// Idempotent.
  virtual void Delete(std::string_view key) = 0;
  virtual bool Exists(std::string_view key) const = 0;
  /// Throws kNotFound when absent.
  virtual std::uint64_t SizeOf(std::string_view key) const = 0;
  /// All keys currently present, sorted.
  virtual std::vector<std::string> ListKeys() const = 0;
};

/// Lock striping shared by the backends: operations on one key serialize on
/// the stripe that key hashes to; different stripes never contend.
class KeyLocks {
 public:
  std::mutex& For(std::string_view key) const;

 private:
  static constexpr std::size_t kStripes = 64;
  mutable std::array<std::mutex, kStripes> stripes_;
};

class MemoryStore final : public ObjectStore {
 public:
  void Put(std::string_view key, std::span<const std::byte> payload) override;
  Bytes Get(std::string_view key) const override;
  void Delete(std::string_view key) override;
  bool Exists(std::string_view key) const override;
  std::uint64_t SizeOf(std::string_view key) const override;
  std::vector<std::string> ListKeys() const override;

 private:
  // One map per stripe so that no lock covers the whole key space.
  struct Shard {
    mutable std::mutex mu;
    std::map<std::string, Bytes, std::less<>> objects;
  };
  Shard& ShardFor(std::string_view key) const;

  static constexpr std::size_t kShards = 64;
  mutable std::array<Shard, kShards> shards_;
};

/// One file per key under `root`, named by `EncodeKeyFilename`. Encoded names
/// longer than `kSegmentChars` are split into directories of that many
/// characters (suffixed ".d") plus a final file, keeping every path component
/// under the usual 255-byte limit. Puts write a temporary file and rename it
/// into place, so readers never see a torn payload.
class DirectoryStore final : public ObjectStore {
 public:
  /// Creates `root` if needed. Throws kStoreIo on failure.
  explicit DirectoryStore(std::filesystem::path root);

  void Put(std::string_view key, std::span<const std::byte> payload) override;
  Bytes Get(std::string_view key) const override;
  void Delete(std::string_view key) override;
  bool Exists(std::string_view key) const override;
  std::uint64_t SizeOf(std::string_view key) const override;
  std::vector<std::string> ListKeys() const override;

  const std::filesystem::path& root() const { return root_; }

  static constexpr std::size_t kSegmentChars = 192;

 private:
  std::filesystem::path PathFor(std::string_view key) const;

  std::filesystem::path root_;
  KeyLocks locks_;
};

/// Percent-encodes every byte outside [A-Za-z0-9_-]; '.' and '/' are always
/// encoded so that keys such as ".." map to ordinary filenames.
std::string EncodeKeyFilename(std::string_view key);
/// Inverse of `EncodeKeyFilename`; nullopt for names it cannot produce.
std::optional<std::string> DecodeKeyFilename(std::string_view filename);

/// Parses "mem" or "dir:<path>".
std::unique_ptr<ObjectStore> OpenStore(std::string_view spec);

}  // namespace kaas

#endif  // KAAS_OBJECT_STORE_H_
