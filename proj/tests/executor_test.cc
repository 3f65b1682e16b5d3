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

#include <memory>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fuzz.h"
#include "kaas/executor.h"
#include "kaas/object_store.h"
#include "kaas/workload.h"
#include "oracles.h"

namespace {

using ::kaas::BufferArg;
using ::kaas::Bytes;
using ::kaas::Direction;
using ::kaas::ErrorKind;
using ::kaas::ExecutorConfig;
using ::kaas::KaasRequest;
using ::kaas::KaasResponse;
using ::kaas::LaunchDims;
using ::kaas::MemoryStore;
using ::kaas::ScalarLiteral;
using ::kaas::testing::RecordingStore;
using ::kaas::testing::ToBytes;
using ::kaas::testing::ToFloats;

class ExecutorTest : public ::testing::Test {
 protected:
  void SetUp() override {
    store_ = std::make_shared<RecordingStore>(std::make_shared<MemoryStore>());
  }

  std::unique_ptr<kaas::Executor> Make(std::uint64_t capacity = 1 << 20) {
    ExecutorConfig config;
    config.capacity = capacity;
    return kaas::MakeSimulatedExecutor(config, store_);
  }

  // Writes 4×4 A and B and returns the oracle (A·B)·(A·B).
  std::vector<float> SeedChain() {
    const Bytes a = kaas::RandomFloats(7, "A", 16);
    const Bytes b = kaas::RandomFloats(7, "B", 16);
    store_->Put("A", a);
    store_->Put("B", b);
    const auto c = kaas::testing::OracleMatmul(ToFloats(a), ToFloats(b), 4, 4, 4);
    return kaas::testing::OracleMatmul(c, c, 4, 4, 4);
  }

  KaasRequest Chain(std::string id = "chain") {
    return kaas::MatmulChainRequest(std::move(id), "A", "B", "D", 4);
  }

  std::shared_ptr<RecordingStore> store_;
};

TEST_F(ExecutorTest, MatmulChainColdRun) {
  const auto expected = SeedChain();
  auto exec = Make();
  const KaasResponse r = exec->Execute(Chain());
  ASSERT_TRUE(r.ok()) << r.error->message;
  EXPECT_EQ(r.io_stats.store_gets, 2u);
  EXPECT_EQ(r.io_stats.store_puts, 1u);
  EXPECT_EQ(r.io_stats.cache_misses, 3u);  // A, B and the fresh output D
  EXPECT_EQ(store_->Get("D"), ToBytes(expected));
  ASSERT_EQ(r.per_invocation.size(), 2u);
  EXPECT_EQ(r.per_invocation[0].kernel_id, "matmul");
}

TEST_F(ExecutorTest, WarmRunSkipsConstFetches) {
  SeedChain();
  auto exec = Make();
  const KaasResponse cold = exec->Execute(Chain("cold"));
  const Bytes cold_d = store_->Get("D");
  const KaasResponse warm = exec->Execute(Chain("warm"));
  ASSERT_TRUE(cold.ok() && warm.ok());
  EXPECT_EQ(warm.io_stats.store_gets, 0u);
  EXPECT_EQ(warm.io_stats.store_puts, 1u);
  const kaas::TimingModel t;
  EXPECT_EQ(cold.simulated_total_time - warm.simulated_total_time,
            t.FetchTime(64) + t.FetchTime(64));
  EXPECT_EQ(store_->Get("D"), cold_d);
}

TEST_F(ExecutorTest, TotalTimeIsSumOfParts) {
  SeedChain();
  auto exec = Make();
  const KaasResponse r = exec->Execute(Chain());
  const kaas::TimingModel t;
  // Two 64-FMA launches per 4×4 product.
  const auto expected = 2 * t.FetchTime(64) + 2 * (t.LaunchOverhead() + t.ComputeTime(64)) +
                        t.FlushTime(64);
  EXPECT_EQ(r.simulated_total_time, expected);
  EXPECT_EQ(exec->now(), expected);
}

TEST_F(ExecutorTest, EmptyRequest) {
  auto exec = Make();
  KaasRequest req;
  req.request_id = "empty";
  const KaasResponse r = exec->Execute(req);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.io_stats, kaas::IoStats{});
  EXPECT_EQ(r.simulated_total_time, kaas::VirtualDuration(0));
}

TEST_F(ExecutorTest, MissingInputIsNotFound) {
  auto exec = Make();
  const KaasResponse r = exec->Execute(Chain());
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error->kind, ErrorKind::kNotFound);
  EXPECT_FALSE(store_->Exists("D"));
}

TEST_F(ExecutorTest, StoredSizeMustMatch) {
  SeedChain();
  store_->Put("B", Bytes(60));
  auto exec = Make();
  const KaasResponse r = exec->Execute(Chain());
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error->kind, ErrorKind::kSizeMismatch);
  EXPECT_EQ(exec->cache().CheckInvariants(), std::nullopt);
}

TEST_F(ExecutorTest, EphemeralStartsZeroed) {
  auto exec = Make();
  KaasRequest req;
  req.request_id = "z";
  req.buffers = {{"E", std::nullopt, 32, false, true, Direction::kInout},
                 {"OUT", "sum", 4, false, false, Direction::kOutput}};
  req.invocations = {{"reduce_sum", LaunchDims{}, {ScalarLiteral::I32(8)}, {"E", "OUT"}}};
  for (int i = 0; i < 3; ++i) {
    // A dirty ephemeral from a previous request must not leak in.
    KaasRequest dirty = req;
    dirty.invocations.insert(dirty.invocations.begin(),
                             kaas::KernelInvocation{"fill", LaunchDims{1, 1, 1, 8, 1, 1},
                              {ScalarLiteral::I32(8), ScalarLiteral::F32(3)}, {"E"}});
    ASSERT_TRUE(exec->Execute(dirty).ok());
    EXPECT_EQ(ToFloats(store_->Get("sum"))[0], 24.0f);
    ASSERT_TRUE(exec->Execute(req).ok());
    EXPECT_EQ(ToFloats(store_->Get("sum"))[0], 0.0f);
  }
}

TEST_F(ExecutorTest, OnlyWrittenOutputKeysReachTheStore) {
  SeedChain();
  auto exec = Make();
  const auto before = store_->ListKeys();
  const std::uint64_t mutations = store_->mutations();
  ASSERT_TRUE(exec->Execute(Chain()).ok());
  std::set<std::string> expected(before.begin(), before.end());
  expected.insert("D");
  const auto after = store_->ListKeys();
  EXPECT_EQ(std::set<std::string>(after.begin(), after.end()), expected);
  EXPECT_EQ(store_->mutations() - mutations, 1u);
}

TEST_F(ExecutorTest, FailedLaunchLeavesStoreUntouched) {
  SeedChain();
  store_->Put("D", Bytes(64, std::byte{9}));
  auto exec = Make();
  KaasRequest req = Chain();
  // A third launch reads one float past the end of 16-float buffers.
  req.invocations.push_back({"vector_add", LaunchDims{1, 1, 1, 32, 1, 1},
                             {ScalarLiteral::I32(17)}, {"A", "B", "D"}});
  const auto snap = kaas::testing::Snapshot(*store_);
  const KaasResponse r = exec->Execute(req);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error->kind, ErrorKind::kBackendFault);
  EXPECT_EQ(kaas::testing::Snapshot(*store_), snap);
  EXPECT_EQ(exec->cache().Find("D"), nullptr);
  for (const auto* e : exec->cache().Entries()) EXPECT_EQ(e->pinned, 0u);
  EXPECT_EQ(exec->cache().ephemeral_bytes(), 0u);
  // The executor keeps working afterwards.
  EXPECT_TRUE(exec->Execute(Chain()).ok());
}

TEST_F(ExecutorTest, KernelProblemsAreCaughtBeforeFetching) {
  SeedChain();
  auto exec = Make();
  KaasRequest req = Chain();
  req.invocations[1].kernel_id = "nope";
  EXPECT_EQ(exec->Execute(req).error->kind, ErrorKind::kUnknownKernel);
  req = Chain();
  req.invocations[0].literals.pop_back();
  EXPECT_EQ(exec->Execute(req).error->kind, ErrorKind::kArityMismatch);
  req = Chain();
  req.invocations[0].args = {"C", "D", "A"};  // writes the const input A
  EXPECT_EQ(exec->Execute(req).error->kind, ErrorKind::kInvalidRequest);
  EXPECT_EQ(store_->gets(), 0u);
}

TEST_F(ExecutorTest, InvalidRequestsAreRejected) {
  auto exec = Make();
  KaasRequest req;
  req.request_id = "bad";
  req.buffers = {{"x", std::nullopt, 4, true, true, Direction::kInput}};
  const KaasResponse r = exec->Execute(req);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error->kind, ErrorKind::kInvalidRequest);
  EXPECT_EQ(r.request_id, "bad");
}

TEST_F(ExecutorTest, PinnedEntryIsBusyForOverwrite) {
  SeedChain();
  auto exec = Make();
  ASSERT_TRUE(exec->Execute(Chain()).ok());
  auto* d = exec->mutable_cache().Find("D");
  ASSERT_NE(d, nullptr);
  exec->mutable_cache().Pin(*d);
  EXPECT_EQ(exec->Execute(Chain()).error->kind, ErrorKind::kBufferBusy);
  exec->mutable_cache().Unpin(*d);
  EXPECT_TRUE(exec->Execute(Chain()).ok());
}

TEST_F(ExecutorTest, WorkingSetLargerThanCapacity) {
  SeedChain();
  auto exec = Make(128);  // A and B fit, C and D do not
  const KaasResponse r = exec->Execute(Chain());
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error->kind, ErrorKind::kOutOfDeviceMemory);
  EXPECT_EQ(exec->cache().ephemeral_bytes(), 0u);
  EXPECT_LE(exec->cache().used_bytes(), 128u);
}

TEST_F(ExecutorTest, ZeroCapacityIsInvalidConfig) {
  try {
    Make(0);
    FAIL();
  } catch (const kaas::KaasError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidConfig);
  }
}

TEST_F(ExecutorTest, NonConstInputIsAlwaysRefetched) {
  store_->Put("x", ToBytes({1, 2}));
  auto exec = Make();
  KaasRequest req;
  req.request_id = "r";
  req.buffers = {{"X", "x", 8, false, false, Direction::kInput},
                 {"S", "s", 4, false, false, Direction::kOutput}};
  req.invocations = {{"reduce_sum", LaunchDims{}, {ScalarLiteral::I32(2)}, {"X", "S"}}};
  ASSERT_TRUE(exec->Execute(req).ok());
  store_->Put("x", ToBytes({5, 5}));
  const KaasResponse r = exec->Execute(req);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.io_stats.store_gets, 1u);
  EXPECT_EQ(ToFloats(store_->Get("s"))[0], 10.0f);
}

TEST_F(ExecutorTest, DeterministicAcrossExecutors) {
  kaas::testing::FuzzRequestGenerator g1(5), g2(5);
  auto s1 = std::make_shared<MemoryStore>(), s2 = std::make_shared<MemoryStore>();
  g1.Seed(*s1);
  g2.Seed(*s2);
  ExecutorConfig config;
  config.capacity = 1 << 20;
  auto e1 = kaas::MakeSimulatedExecutor(config, s1);
  auto e2 = kaas::MakeSimulatedExecutor(config, s2);
  for (int i = 0; i < 300; ++i) {
    const auto id = std::to_string(i);
    ASSERT_EQ(e1->Execute(g1.Next(id)), e2->Execute(g2.Next(id))) << i;
  }
  EXPECT_EQ(kaas::testing::Snapshot(*s1), kaas::testing::Snapshot(*s2));
}

TEST(ExecutorFuzzTest, LedgerPinsAndAtomicity) {
  const auto r = kaas::testing::RunCacheFuzz(11, 1500, 1 << 20);
  EXPECT_EQ(r.crashes, 0) << r.first_problem;
  EXPECT_EQ(r.invariant_violations, 0) << r.first_problem;
  EXPECT_EQ(r.pin_leaks, 0) << r.first_problem;
  EXPECT_EQ(r.atomicity_violations, 0) << r.first_problem;
  // The generator must exercise both paths.
  EXPECT_GT(r.ok, 100);
  EXPECT_GT(r.failed, 100);
}

}  // namespace
