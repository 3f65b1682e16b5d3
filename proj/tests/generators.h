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

// Random generators for property tests.

#ifndef KAAS_TESTS_GENERATORS_H_
#define KAAS_TESTS_GENERATORS_H_

#include <cstdint>
#include <cstring>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "kaas/protocol.h"

namespace kaas::testing {

inline std::string RandomName(std::mt19937_64& rng, std::size_t max_len = 8) {
  static constexpr char kChars[] =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789._/-";
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<std::size_t> ch(0, sizeof(kChars) - 2);
  std::string s(len(rng), ' ');
  for (auto& c : s) c = kChars[ch(rng)];
  return s;
}

inline ScalarLiteral RandomLiteral(std::mt19937_64& rng) {
  switch (rng() % 4) {
    case 0:
      return ScalarLiteral::I32(static_cast<std::int32_t>(rng()));
    case 1:
      return ScalarLiteral::I64(static_cast<std::int64_t>(rng()));
    case 2: {
      // Arbitrary bit patterns cover NaN, infinities, subnormals and -0.
      const auto bits = static_cast<std::uint32_t>(rng());
      float f;
      std::memcpy(&f, &bits, sizeof f);
      return ScalarLiteral::F32(f);
    }
    default: {
      const std::uint64_t bits = rng();
      double d;
      std::memcpy(&d, &bits, sizeof d);
      return ScalarLiteral::F64(d);
    }
  }
}

/// Structurally arbitrary requests, valid or not: the codec must round-trip
/// all of them.
inline KaasRequest RandomRequest(std::mt19937_64& rng) {
  KaasRequest req;
  req.request_id = rng() % 10 == 0 ? "" : RandomName(rng, 16);
  const std::size_t nbuf = rng() % 6;
  for (std::size_t i = 0; i < nbuf; ++i) {
    BufferArg b;
    b.name = RandomName(rng);
    if (rng() % 4 != 0) b.key = RandomName(rng, 24);
    b.size = rng() % 3 == 0 ? rng() : rng() % 4096;
    b.is_const = rng() % 2;
    b.is_ephemeral = rng() % 3 == 0;
    b.direction = static_cast<Direction>(rng() % 3);
    req.buffers.push_back(std::move(b));
  }
  const std::size_t ninv = rng() % 4;
  for (std::size_t i = 0; i < ninv; ++i) {
    KernelInvocation inv;
    inv.kernel_id = RandomName(rng, 12);
    auto dim = [&] { return static_cast<std::int64_t>(rng() % 70) - 3; };
    inv.dims = {dim(), dim(), dim(), dim(), dim(), dim()};
    const std::size_t nlit = rng() % 4;
    for (std::size_t l = 0; l < nlit; ++l) inv.literals.push_back(RandomLiteral(rng));
    const std::size_t nargs = rng() % 4;
    for (std::size_t a = 0; a < nargs; ++a) {
      inv.args.push_back(!req.buffers.empty() && rng() % 4 != 0
                             ? req.buffers[rng() % req.buffers.size()].name
                             : RandomName(rng));
    }
    req.invocations.push_back(std::move(inv));
  }
  return req;
}

inline KaasResponse RandomResponse(std::mt19937_64& rng) {
  KaasResponse resp;
  resp.request_id = RandomName(rng, 16);
  if (rng() % 3 == 0) {
    resp.error = ResponseError{static_cast<ErrorKind>(rng() % 17),
                               "message " + RandomName(rng, 20)};
  }
  const std::size_t n = rng() % 4;
  for (std::size_t i = 0; i < n; ++i) {
    resp.per_invocation.push_back(
        {RandomName(rng), VirtualDuration(static_cast<std::int64_t>(rng() >> 1)),
         VirtualDuration(static_cast<std::int64_t>(rng() >> 1))});
  }
  resp.io_stats = {rng(), rng(), rng(), rng(), rng(), rng()};
  resp.simulated_total_time =
      VirtualDuration(static_cast<std::int64_t>(rng() >> 1));
  return resp;
}

}  // namespace kaas::testing

#endif  // KAAS_TESTS_GENERATORS_H_
