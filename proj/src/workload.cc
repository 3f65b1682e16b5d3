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

#include "kaas/workload.h"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "kaas/error.h"

namespace kaas {

std::string_view WorkloadKindName(WorkloadKind kind) {
  switch (kind) {
    case WorkloadKind::kMatmulChain:
      return "matmul_chain";
    case WorkloadKind::kZipfConst:
      return "zipf_const";
    case WorkloadKind::kMixed:
      return "mixed";
  }
  return "matmul_chain";
}

WorkloadKind ParseWorkloadKind(std::string_view name) {
  for (auto k : {WorkloadKind::kMatmulChain, WorkloadKind::kZipfConst,
                 WorkloadKind::kMixed}) {
    if (WorkloadKindName(k) == name) return k;
  }
  throw KaasError(ErrorKind::kInvalidWorkload,
                  "unknown workload \"" + std::string(name) + "\"");
}

void WorkloadSpec::Validate() const {
  auto fail = [](const std::string& what) {
    throw KaasError(ErrorKind::kInvalidWorkload, what);
  };
  if (request_count < 1) fail("request_count must be >= 1");
  if (matrix_dim < 1) fail("matrix_dim must be >= 1");
  if (matrix_dim > 4096) fail("matrix_dim must be <= 4096");
  if (key_universe < 1) fail("key_universe must be >= 1");
  if (!(zipf_s > 0) || !std::isfinite(zipf_s)) fail("zipf_s must be > 0");
}

std::string ZipfKey(std::size_t rank) { return "blob/" + std::to_string(rank); }

Bytes RandomFloats(std::uint64_t seed, std::string_view key, std::size_t count) {
  // FNV-1a so the stream does not depend on the standard library's hash.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::mt19937_64 rng(seed ^ h);
  Bytes out(count * sizeof(float));
  for (std::size_t i = 0; i < count; ++i) {
    const float v =
        static_cast<float>(static_cast<std::int64_t>(rng() >> 40)) / 8388608.0f -
        1.0f;
    std::memcpy(out.data() + i * sizeof(float), &v, sizeof(float));
  }
  return out;
}

ZipfSampler::ZipfSampler(std::size_t n, double s) : cdf_(n) {
  double total = 0;
  for (std::size_t r = 0; r < n; ++r) {
    total += 1.0 / std::pow(static_cast<double>(r + 1), s);
    cdf_[r] = total;
  }
  for (auto& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

std::size_t ZipfSampler::operator()(std::mt19937_64& rng) const {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return static_cast<std::size_t>(
      std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
}

KaasRequest MatmulChainRequest(std::string request_id, std::string a_key,
                               std::string b_key, std::string out_key,
                               std::size_t n) {
  const std::uint64_t bytes = n * n * sizeof(float);
  const auto ni = static_cast<std::int32_t>(n);
  const LaunchDims dims{static_cast<std::int64_t>((n * n + 31) / 32), 1, 1,
                        32, 1, 1};
  const std::vector<ScalarLiteral> nmk{ScalarLiteral::I32(ni),
                                       ScalarLiteral::I32(ni),
                                       ScalarLiteral::I32(ni)};
  KaasRequest req;
  req.request_id = std::move(request_id);
  req.buffers = {
      {"A", std::move(a_key), bytes, true, false, Direction::kInput},
      {"B", std::move(b_key), bytes, true, false, Direction::kInput},
      {"C", std::nullopt, bytes, false, true, Direction::kInout},
      {"D", std::move(out_key), bytes, false, false, Direction::kOutput},
  };
  req.invocations = {
      {"matmul", dims, nmk, {"A", "B", "C"}},
      {"matmul", dims, nmk, {"C", "C", "D"}},
  };
  return req;
}

KaasRequest ZipfConstRequest(std::string request_id, std::string key) {
  constexpr auto kCount = static_cast<std::int32_t>(kZipfBlobBytes / 4);
  KaasRequest req;
  req.request_id = std::move(request_id);
  req.buffers = {
      {"W", std::move(key), kZipfBlobBytes, true, false, Direction::kInput},
      {"S", std::nullopt, sizeof(float), false, true, Direction::kOutput},
  };
  req.invocations = {{"reduce_sum",
                      LaunchDims{1, 1, 1, 1, 1, 1},
                      {ScalarLiteral::I32(kCount)},
                      {"W", "S"}}};
  return req;
}

void GenData(const WorkloadSpec& spec, ObjectStore& store) {
  spec.Validate();
  const bool chain = spec.kind != WorkloadKind::kZipfConst;
  const bool zipf = spec.kind != WorkloadKind::kMatmulChain;
  if (chain) {
    const std::size_t count = spec.matrix_dim * spec.matrix_dim;
    for (const char* key : {"A", "B"}) {
      store.Put(key, RandomFloats(spec.seed, key, count));
    }
  }
  if (zipf) {
    for (std::size_t r = 0; r < spec.key_universe; ++r) {
      const std::string key = ZipfKey(r);
      store.Put(key, RandomFloats(spec.seed, key, kZipfBlobBytes / 4));
    }
  }
}

std::vector<KaasRequest> MakeRequests(const WorkloadSpec& spec) {
  spec.Validate();
  std::vector<KaasRequest> out;
  out.reserve(spec.request_count);
  const std::string prefix(WorkloadKindName(spec.kind));
  std::mt19937_64 rng(spec.seed);
  const ZipfSampler zipf(spec.key_universe, spec.zipf_s);
  for (std::size_t i = 0; i < spec.request_count; ++i) {
    const std::string id = prefix + "-" + std::to_string(i);
    switch (spec.kind) {
      case WorkloadKind::kMatmulChain:
        out.push_back(MatmulChainRequest(id, "A", "B", "D", spec.matrix_dim));
        break;
      case WorkloadKind::kZipfConst:
        out.push_back(ZipfConstRequest(id, ZipfKey(zipf(rng))));
        break;
      case WorkloadKind::kMixed:
        if (i % 2 == 0) {
          out.push_back(ZipfConstRequest(id, ZipfKey(zipf(rng))));
        } else {
          out.push_back(MatmulChainRequest(id, "A", "B",
                                           "mixed/out/" + std::to_string(i),
                                           spec.matrix_dim));
        }
        break;
    }
  }
  return out;
}

}  // namespace kaas
