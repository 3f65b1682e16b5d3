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

#include <atomic>
#include <filesystem>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "generators.h"
#include "kaas/error.h"
#include "kaas/object_store.h"

namespace {

using ::kaas::Bytes;
using ::kaas::DirectoryStore;
using ::kaas::ErrorKind;
using ::kaas::KaasError;
using ::kaas::MemoryStore;
using ::kaas::ObjectStore;

Bytes B(std::initializer_list<int> v) {
  Bytes out;
  for (int x : v) out.push_back(static_cast<std::byte>(x));
  return out;
}

Bytes RandomBytes(std::mt19937_64& rng, std::size_t n) {
  Bytes out(n);
  for (auto& b : out) b = static_cast<std::byte>(rng());
  return out;
}

std::filesystem::path FreshDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("kaas_store_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  return dir;
}

template <typename F>
ErrorKind KindOf(F&& f) {
  try {
    f();
  } catch (const KaasError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error";
  return ErrorKind::kInvalidRequest;
}

class StoreTest : public ::testing::TestWithParam<std::string> {
 protected:
  void SetUp() override {
    if (GetParam() == "mem") {
      store_ = std::make_unique<MemoryStore>();
    } else {
      dir_ = FreshDir(::testing::UnitTest::GetInstance()->current_test_info()->name());
      store_ = std::make_unique<DirectoryStore>(dir_);
    }
  }
  void TearDown() override {
    if (!dir_.empty()) std::filesystem::remove_all(dir_);
  }

  std::unique_ptr<ObjectStore> store_;
  std::filesystem::path dir_;
};

TEST_P(StoreTest, ReadYourWrite) {
  store_->Put("a", B({1, 2, 3}));
  EXPECT_EQ(store_->Get("a"), B({1, 2, 3}));
}

TEST_P(StoreTest, LastWriterWins) {
  store_->Put("a", B({1}));
  store_->Put("a", B({9, 9}));
  EXPECT_EQ(store_->Get("a"), B({9, 9}));
}

TEST_P(StoreTest, InvalidKey) {
  EXPECT_EQ(KindOf([&] { store_->Put("bad key!", B({1})); }), ErrorKind::kInvalidKey);
  EXPECT_EQ(KindOf([&] { store_->Get(""); }), ErrorKind::kInvalidKey);
  EXPECT_EQ(KindOf([&] { store_->Exists(std::string(257, 'a')); }),
            ErrorKind::kInvalidKey);
  EXPECT_NO_THROW(store_->Put(std::string(256, 'a'), B({1})));
}

TEST_P(StoreTest, NotFound) {
  EXPECT_EQ(KindOf([&] { store_->Get("a"); }), ErrorKind::kNotFound);
  store_->Put("a", B({1}));
  store_->Delete("a");
  EXPECT_EQ(KindOf([&] { store_->Get("a"); }), ErrorKind::kNotFound);
  EXPECT_EQ(KindOf([&] { store_->SizeOf("a"); }), ErrorKind::kNotFound);
}

TEST_P(StoreTest, DeleteExistsSize) {
  store_->Put("x/y.z", Bytes(40));
  EXPECT_TRUE(store_->Exists("x/y.z"));
  EXPECT_EQ(store_->SizeOf("x/y.z"), 40u);
  store_->Delete("x/y.z");
  EXPECT_NO_THROW(store_->Delete("x/y.z"));
  EXPECT_FALSE(store_->Exists("x/y.z"));
}

TEST_P(StoreTest, EmptyPayloadAndAwkwardKeys) {
  for (const char* key : {".", "..", "a/../b", "-", "_", "a.tmp.1"}) {
    store_->Put(key, Bytes{});
    EXPECT_TRUE(store_->Exists(key)) << key;
    EXPECT_EQ(store_->SizeOf(key), 0u);
  }
  EXPECT_THAT(store_->ListKeys(),
              ::testing::ElementsAre("-", ".", "..", "_", "a.tmp.1", "a/../b"));
}

TEST_P(StoreTest, OneMebibyteRandomPayload) {
  std::mt19937_64 rng(3);
  const Bytes payload = RandomBytes(rng, 1 << 20);
  store_->Put("big", payload);
  EXPECT_EQ(store_->Get("big"), payload);
}

// Concurrent writers of whole payloads: a reader only ever sees one of the
// written payloads, never a mix.
TEST_P(StoreTest, NoTornReads) {
  const Bytes a(4096, std::byte{0xAA});
  const Bytes b(8192, std::byte{0xBB});
  store_->Put("k", a);
  std::atomic<bool> done{false};
  std::thread writer([&] {
    for (int i = 0; i < 300; ++i) store_->Put("k", i % 2 ? a : b);
    done = true;
  });
  int reads = 0;
  while (!done || reads < 10) {
    const Bytes got = store_->Get("k");
    ASSERT_TRUE(got == a || got == b);
    ++reads;
  }
  writer.join();
}

INSTANTIATE_TEST_SUITE_P(Backends, StoreTest, ::testing::Values("mem", "dir"));

// Both backends observe the same results for the same random trace.
TEST(StoreEquivalenceTest, RandomTrace) {
  const auto dir = FreshDir("equiv");
  MemoryStore mem;
  DirectoryStore disk(dir);
  std::mt19937_64 rng(11);
  std::vector<std::string> keys;
  for (int i = 0; i < 12; ++i) keys.push_back(kaas::testing::RandomName(rng, 10));
  keys.push_back("bad key");

  auto outcome = [](ObjectStore& s, int op, const std::string& key,
                    const Bytes& payload) -> std::string {
    try {
      switch (op) {
        case 0:
          s.Put(key, payload);
          return "put";
        case 1: {
          const Bytes got = s.Get(key);
          return "get:" + std::string(reinterpret_cast<const char*>(got.data()),
                                      got.size());
        }
        case 2:
          s.Delete(key);
          return "del";
        case 3:
          return s.Exists(key) ? "yes" : "no";
        default:
          return "size:" + std::to_string(s.SizeOf(key));
      }
    } catch (const KaasError& e) {
      return "error:" + std::string(kaas::ErrorKindName(e.kind()));
    }
  };

  for (int step = 0; step < 2000; ++step) {
    const int op = static_cast<int>(rng() % 5);
    const std::string& key = keys[rng() % keys.size()];
    const Bytes payload = RandomBytes(rng, rng() % 64);
    ASSERT_EQ(outcome(mem, op, key, payload), outcome(disk, op, key, payload))
        << "step " << step << " op " << op << " key " << key;
  }
  EXPECT_EQ(mem.ListKeys(), disk.ListKeys());
  std::filesystem::remove_all(dir);
}

TEST(KeyFilenameTest, RoundTripAndNoDots) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const std::string key = kaas::testing::RandomName(rng, 40);
    const std::string file = kaas::EncodeKeyFilename(key);
    EXPECT_EQ(file.find('.'), std::string::npos);
    EXPECT_EQ(file.find('/'), std::string::npos);
    EXPECT_EQ(kaas::DecodeKeyFilename(file), key);
  }
  EXPECT_EQ(kaas::EncodeKeyFilename("a/b.c"), "a%2Fb%2Ec");
  EXPECT_EQ(kaas::DecodeKeyFilename("a.tmp.3"), std::nullopt);
  EXPECT_EQ(kaas::DecodeKeyFilename("a%2"), std::nullopt);
}

TEST(DirectoryStoreTest, LayoutIsOneFilePerKey) {
  const auto dir = FreshDir("layout");
  DirectoryStore store(dir);
  store.Put("models/w.bin", B({1, 2}));
  EXPECT_TRUE(std::filesystem::is_regular_file(dir / "models%2Fw%2Ebin"));
  EXPECT_EQ(std::filesystem::file_size(dir / "models%2Fw%2Ebin"), 2u);
  std::filesystem::remove_all(dir);
}

TEST(DirectoryStoreTest, LongKeysAreSegmented) {
  const auto dir = FreshDir("long");
  DirectoryStore store(dir);
  // 256 dots encode to 768 characters, far past a single filename's limit.
  const std::string dots(256, '.');
  const std::string plain(DirectoryStore::kSegmentChars, 'a');
  const std::string longer = plain + "b";
  for (const auto& key : {dots, plain, longer}) store.Put(key, B({7}));
  EXPECT_TRUE(std::filesystem::is_regular_file(dir / plain));
  EXPECT_TRUE(std::filesystem::is_regular_file(dir / (plain + ".d") / "b"));
  EXPECT_EQ(store.ListKeys(), (std::vector<std::string>{dots, plain, longer}));
  EXPECT_EQ(store.Get(dots), B({7}));
  store.Delete(longer);
  EXPECT_FALSE(store.Exists(longer));
  EXPECT_TRUE(store.Exists(plain));
  EXPECT_EQ(store.ListKeys(), (std::vector<std::string>{dots, plain}));
  std::filesystem::remove_all(dir);
}

TEST(OpenStoreTest, Specs) {
  EXPECT_NE(dynamic_cast<MemoryStore*>(kaas::OpenStore("mem").get()), nullptr);
  const auto dir = FreshDir("open");
  EXPECT_NE(dynamic_cast<DirectoryStore*>(kaas::OpenStore("dir:" + dir.string()).get()),
            nullptr);
  EXPECT_EQ(KindOf([] { kaas::OpenStore("s3://x"); }), ErrorKind::kInvalidConfig);
  std::filesystem::remove_all(dir);
}

}  // namespace
