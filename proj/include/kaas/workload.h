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

#ifndef KAAS_WORKLOAD_H_
#define KAAS_WORKLOAD_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "kaas/object_store.h"
#include "kaas/protocol.h"

namespace kaas {

enum class WorkloadKind { kMatmulChain, kZipfConst, kMixed };

std::string_view WorkloadKindName(WorkloadKind kind);
/// Throws kInvalidWorkload.
WorkloadKind ParseWorkloadKind(std::string_view name);

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::kMatmulChain;
  std::size_t request_count = 1;
  std::size_t matrix_dim = 4;
  double zipf_s = 1.0;
  std::size_t key_universe = 100;
  std::uint64_t seed = 1;

  /// Throws kInvalidWorkload.
  void Validate() const;
};

/// Size of every zipf_const blob: 16384 f32 values.
inline constexpr std::uint64_t kZipfBlobBytes = 64 * 1024;

/// Key of the zipf blob with popularity rank `rank` (0 = most popular).
std::string ZipfKey(std::size_t rank);

/// Seeded payload of `count` f32 values uniform in [-1, 1). Depends only on
/// `seed` and `key`.
Bytes RandomFloats(std::uint64_t seed, std::string_view key, std::size_t count);

/// Stores every object the workload reads.
void GenData(const WorkloadSpec& spec, ObjectStore& store);

/// The workload's request stream, deterministic in `spec`.
std::vector<KaasRequest> MakeRequests(const WorkloadSpec& spec);

/// Two chained n×n products: C = A·B on an ephemeral, then OUT = C·C.
/// A and B are const inputs.
KaasRequest MatmulChainRequest(std::string request_id, std::string a_key,
                               std::string b_key, std::string out_key,
                               std::size_t n);

/// reduce_sum over one const 64 KiB blob into an ephemeral scalar.
KaasRequest ZipfConstRequest(std::string request_id, std::string key);

/// Draws ranks in [0, n) with P(r) proportional to 1 / (r + 1)^s by inverse
/// CDF over a 53-bit uniform, so draws are identical across platforms.
class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double s);
  std::size_t operator()(std::mt19937_64& rng) const;

 private:
  std::vector<double> cdf_;
};

}  // namespace kaas

#endif  // KAAS_WORKLOAD_H_
