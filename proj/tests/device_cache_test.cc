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

#include <algorithm>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "kaas/device_cache.h"
#include "kaas/error.h"
#include "lru_oracle.h"

namespace {

using ::kaas::DeviceCache;
using ::kaas::ErrorKind;
using ::kaas::KaasError;

ErrorKind KindOf(auto&& f) {
  try {
    f();
  } catch (const KaasError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error";
  return ErrorKind::kInvalidRequest;
}

TEST(DeviceCacheTest, LeastRecentlyTouchedGoesFirst) {
  DeviceCache cache(64);
  auto& a = cache.Insert("a", 32, true);
  auto& b = cache.Insert("b", 32, true);
  cache.Touch(a);
  cache.Touch(b);
  std::vector<std::string> evicted;
  EXPECT_EQ(cache.EvictUntil(32, &evicted), 32u);
  cache.Insert("c", 32, true);
  EXPECT_EQ(evicted, std::vector<std::string>{"a"});
  EXPECT_EQ(cache.KeysByRecency(), (std::vector<std::string>{"b", "c"}));
  EXPECT_EQ(cache.CheckInvariants(), std::nullopt);
}

TEST(DeviceCacheTest, NothingNeededIsNoOp) {
  DeviceCache cache(64);
  cache.Insert("a", 64, false);
  EXPECT_EQ(cache.EvictUntil(0), 0u);
  EXPECT_EQ(cache.entry_count(), 1u);
}

TEST(DeviceCacheTest, PinnedAndDirtyAreNotCandidates) {
  DeviceCache cache(64);
  auto& a = cache.Insert("a", 32, false);
  auto& b = cache.Insert("b", 32, false);
  cache.Pin(a);
  b.dirty = true;
  EXPECT_EQ(KindOf([&] { cache.EvictUntil(1); }), ErrorKind::kOutOfDeviceMemory);
  EXPECT_EQ(cache.entry_count(), 2u);
  b.dirty = false;
  EXPECT_EQ(cache.EvictUntil(32), 32u);
  EXPECT_EQ(cache.KeysByRecency(), std::vector<std::string>{"a"});
}

TEST(DeviceCacheTest, ImpossibleRequestEvictsNothing) {
  DeviceCache cache(64);
  cache.Insert("a", 16, false);
  cache.Pin(cache.Insert("b", 32, false));
  EXPECT_EQ(KindOf([&] { cache.EvictUntil(48); }), ErrorKind::kOutOfDeviceMemory);
  EXPECT_EQ(cache.entry_count(), 2u);
  EXPECT_EQ(KindOf([&] { cache.EvictUntil(65); }), ErrorKind::kOutOfDeviceMemory);
}

TEST(DeviceCacheTest, EphemeralSharesCapacity) {
  DeviceCache cache(64);
  cache.Insert("a", 32, false);
  cache.ReserveEphemeral(32);
  EXPECT_EQ(cache.free_bytes(), 0u);
  EXPECT_EQ(KindOf([&] { cache.ReserveEphemeral(1); }), ErrorKind::kOutOfDeviceMemory);
  EXPECT_EQ(KindOf([&] { cache.Insert("b", 1, false); }), ErrorKind::kOutOfDeviceMemory);
  cache.EvictUntil(32);
  cache.ReserveEphemeral(32);
  EXPECT_EQ(cache.entry_count(), 0u);
  cache.ReleaseEphemeral(64);
  EXPECT_EQ(cache.free_bytes(), 64u);
  EXPECT_EQ(cache.CheckInvariants(), std::nullopt);
}

TEST(DeviceCacheTest, TicksAreUnique) {
  DeviceCache cache(1024);
  for (int i = 0; i < 10; ++i) cache.Insert("k" + std::to_string(i), 8, false);
  cache.Touch(*cache.Find("k3"));
  cache.Touch(*cache.Find("k0"));
  const auto keys = cache.KeysByRecency();
  EXPECT_EQ(keys.back(), "k0");
  EXPECT_EQ(keys[keys.size() - 2], "k3");
  std::vector<std::uint64_t> ticks;
  for (const auto* e : cache.Entries()) ticks.push_back(e->last_use);
  std::sort(ticks.begin(), ticks.end());
  EXPECT_EQ(std::adjacent_find(ticks.begin(), ticks.end()), ticks.end());
}

TEST(DeviceCacheTest, EraseRequiresUnpinned) {
  DeviceCache cache(64);
  auto& a = cache.Insert("a", 8, false);
  cache.Pin(a);
  EXPECT_ANY_THROW(cache.Erase("a"));
  cache.Unpin(a);
  cache.Erase("a");
  cache.Erase("missing");
  EXPECT_EQ(cache.used_bytes(), 0u);
}

TEST(DeviceCacheTest, AllocationsAreZeroedAndGuarded) {
  kaas::DeviceAllocation m(40);
  for (auto b : m.bytes()) ASSERT_EQ(b, std::byte{0});
  m.bytes()[39] = std::byte{7};
  EXPECT_TRUE(m.GuardsIntact());
  m.bytes().data()[40] = std::byte{0};  // one past the end
  EXPECT_FALSE(m.GuardsIntact());
}

class LruReplayTest : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(LruReplayTest, MatchesOracleStepByStep) {
  const auto r = kaas::testing::ReplayLruTrace(GetParam(), 200);
  ASSERT_EQ(r.cache.size(), 200u);
  for (std::size_t i = 0; i < r.cache.size(); ++i) {
    ASSERT_EQ(r.cache[i], r.oracle[i]) << "step " << i;
  }
  EXPECT_TRUE(r.invariants_ok);
}

INSTANTIATE_TEST_SUITE_P(Seeds, LruReplayTest, ::testing::Values(1, 2, 3, 17, 2026));

}  // namespace
