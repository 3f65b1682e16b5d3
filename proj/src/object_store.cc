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

#include "kaas/object_store.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <system_error>

#include "kaas/error.h"

namespace kaas {

bool IsValidStoreKey(std::string_view key) {
  if (key.empty() || key.size() > kMaxStoreKeyLength) return false;
  for (char c : key) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' ||
                    c == '/' || c == '-';
    if (!ok) return false;
  }
  return true;
}

void CheckStoreKey(std::string_view key) {
  if (!IsValidStoreKey(key)) {
    throw KaasError(ErrorKind::kInvalidKey,
                    "invalid store key \"" + std::string(key) + "\"");
  }
}

namespace {

[[noreturn]] void NotFound(std::string_view key) {
  throw KaasError(ErrorKind::kNotFound,
                  "no object with key \"" + std::string(key) + "\"");
}

std::size_t Stripe(std::string_view key, std::size_t n) {
  return std::hash<std::string_view>{}(key) % n;
}

}  // namespace

std::mutex& KeyLocks::For(std::string_view key) const {
  return stripes_[Stripe(key, kStripes)];
}

// ---- MemoryStore ----

MemoryStore::Shard& MemoryStore::ShardFor(std::string_view key) const {
  return shards_[Stripe(key, kShards)];
}

void MemoryStore::Put(std::string_view key, std::span<const std::byte> payload) {
  CheckStoreKey(key);
  Bytes copy(payload.begin(), payload.end());
  Shard& s = ShardFor(key);
  std::lock_guard lock(s.mu);
  auto it = s.objects.find(key);
  if (it == s.objects.end()) {
    s.objects.emplace(std::string(key), std::move(copy));
  } else {
    it->second = std::move(copy);
  }
}

Bytes MemoryStore::Get(std::string_view key) const {
  CheckStoreKey(key);
  Shard& s = ShardFor(key);
  std::lock_guard lock(s.mu);
  auto it = s.objects.find(key);
  if (it == s.objects.end()) NotFound(key);
  return it->second;
}

void MemoryStore::Delete(std::string_view key) {
  CheckStoreKey(key);
  Shard& s = ShardFor(key);
  std::lock_guard lock(s.mu);
  if (auto it = s.objects.find(key); it != s.objects.end()) s.objects.erase(it);
}

bool MemoryStore::Exists(std::string_view key) const {
  CheckStoreKey(key);
  Shard& s = ShardFor(key);
  std::lock_guard lock(s.mu);
  return s.objects.find(key) != s.objects.end();
}

std::uint64_t MemoryStore::SizeOf(std::string_view key) const {
  CheckStoreKey(key);
  Shard& s = ShardFor(key);
  std::lock_guard lock(s.mu);
  auto it = s.objects.find(key);
  if (it == s.objects.end()) NotFound(key);
  return it->second.size();
}

std::vector<std::string> MemoryStore::ListKeys() const {
  std::vector<std::string> keys;
  for (auto& s : shards_) {
    std::lock_guard lock(s.mu);
    for (const auto& [k, v] : s.objects) keys.push_back(k);
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

// ---- filename encoding ----

std::string EncodeKeyFilename(std::string_view key) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : key) {
    const bool plain = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                       (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (plain) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

std::optional<std::string> DecodeKeyFilename(std::string_view filename) {
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  for (std::size_t i = 0; i < filename.size(); ++i) {
    const char c = filename[i];
    if (c == '%') {
      if (i + 2 >= filename.size()) return std::nullopt;
      const int hi = hex(filename[i + 1]);
      const int lo = hex(filename[i + 2]);
      if (hi < 0 || lo < 0) return std::nullopt;
      out.push_back(static_cast<char>(hi * 16 + lo));
      i += 2;
    } else if (c == '.') {
      // Temporary files carry a literal '.', real object files never do.
      return std::nullopt;
    } else {
      out.push_back(c);
    }
  }
  if (!IsValidStoreKey(out)) return std::nullopt;
  return out;
}

// ---- DirectoryStore ----

namespace {

[[noreturn]] void IoFail(const std::string& what, const std::filesystem::path& p) {
  throw KaasError(ErrorKind::kStoreIo, what + " " + p.string());
}

std::atomic<std::uint64_t> temp_counter{0};

}  // namespace

DirectoryStore::DirectoryStore(std::filesystem::path root)
    : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec || !std::filesystem::is_directory(root_)) {
    IoFail("cannot create store directory", root_);
  }
}

std::filesystem::path DirectoryStore::PathFor(std::string_view key) const {
  const std::string name = EncodeKeyFilename(key);
  std::filesystem::path path = root_;
  std::size_t i = 0;
  for (; name.size() - i > kSegmentChars; i += kSegmentChars) {
    path /= name.substr(i, kSegmentChars) + ".d";
  }
  return path / name.substr(i);
}

void DirectoryStore::Put(std::string_view key,
                         std::span<const std::byte> payload) {
  CheckStoreKey(key);
  const auto final_path = PathFor(key);
  auto temp_path = final_path;
  temp_path += ".tmp." + std::to_string(temp_counter.fetch_add(1));
  std::lock_guard lock(locks_.For(key));
  if (final_path.parent_path() != root_) {
    std::error_code ec;
    std::filesystem::create_directories(final_path.parent_path(), ec);
    if (ec) IoFail("cannot create", final_path.parent_path());
  }
  {
    std::ofstream out(temp_path, std::ios::binary | std::ios::trunc);
    if (!out) IoFail("cannot open", temp_path);
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    if (!out.flush()) IoFail("cannot write", temp_path);
  }
  std::error_code ec;
  std::filesystem::rename(temp_path, final_path, ec);
  if (ec) {
    std::filesystem::remove(temp_path, ec);
    IoFail("cannot rename into", final_path);
  }
}

Bytes DirectoryStore::Get(std::string_view key) const {
  CheckStoreKey(key);
  const auto path = PathFor(key);
  std::lock_guard lock(locks_.For(key));
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) NotFound(key);
  const auto size = static_cast<std::size_t>(in.tellg());
  Bytes out(size);
  in.seekg(0);
  if (!in.read(reinterpret_cast<char*>(out.data()),
               static_cast<std::streamsize>(size))) {
    IoFail("cannot read", path);
  }
  return out;
}

void DirectoryStore::Delete(std::string_view key) {
  CheckStoreKey(key);
  std::lock_guard lock(locks_.For(key));
  std::error_code ec;
  std::filesystem::remove(PathFor(key), ec);
  if (ec) IoFail("cannot remove", PathFor(key));
}

bool DirectoryStore::Exists(std::string_view key) const {
  CheckStoreKey(key);
  std::lock_guard lock(locks_.For(key));
  std::error_code ec;
  return std::filesystem::is_regular_file(PathFor(key), ec);
}

std::uint64_t DirectoryStore::SizeOf(std::string_view key) const {
  CheckStoreKey(key);
  std::lock_guard lock(locks_.For(key));
  std::error_code ec;
  const auto size = std::filesystem::file_size(PathFor(key), ec);
  if (ec) NotFound(key);
  return size;
}

std::vector<std::string> DirectoryStore::ListKeys() const {
  std::vector<std::string> keys;
  std::error_code ec;
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(root_, ec)) {
    if (!entry.is_regular_file()) continue;
    // Rebuild the encoded name from full-length ".d" segments.
    std::string name;
    bool well_formed = true;
    const auto rel = entry.path().lexically_relative(root_);
    for (auto it = rel.begin(); it != rel.end(); ++it) {
      std::string part = it->string();
      if (std::next(it) == rel.end()) {
        name += part;
      } else if (part.size() == kSegmentChars + 2 && part.ends_with(".d")) {
        name += part.substr(0, kSegmentChars);
      } else {
        well_formed = false;
      }
    }
    if (!well_formed) continue;
    auto key = DecodeKeyFilename(name);
    if (key && PathFor(*key) == entry.path()) keys.push_back(*std::move(key));
  }
  if (ec) IoFail("cannot list", root_);
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::unique_ptr<ObjectStore> OpenStore(std::string_view spec) {
  if (spec == "mem") return std::make_unique<MemoryStore>();
  constexpr std::string_view kDir = "dir:";
  if (spec.substr(0, kDir.size()) == kDir && spec.size() > kDir.size()) {
    return std::make_unique<DirectoryStore>(
        std::filesystem::path(std::string(spec.substr(kDir.size()))));
  }
  throw KaasError(ErrorKind::kInvalidConfig,
                  "store must be \"mem\" or \"dir:<path>\", got \"" +
                      std::string(spec) + "\"");
}

}  // namespace kaas
