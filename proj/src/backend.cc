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

#include "kaas/backend.h"

#include <bit>
#include <cstring>
#include <limits>

#include "kaas/error.h"

namespace kaas {

static_assert(std::endian::native == std::endian::little,
              "simulated device memory is little-endian");

void FloatView::Fault(std::uint64_t i) const {
  throw KaasError(ErrorKind::kBackendFault,
                  "out-of-bounds access to buffer parameter " +
                      std::to_string(param_) + ": element " +
                      std::to_string(i) + " of " + std::to_string(size()));
}

float FloatView::Load(std::uint64_t i) const {
  if (i >= size()) Fault(i);
  float v;
  std::memcpy(&v, bytes_.data() + i * sizeof(float), sizeof(float));
  return v;
}

void FloatView::Store(std::uint64_t i, float v) const {
  if (i >= size()) Fault(i);
  std::memcpy(bytes_.data() + i * sizeof(float), &v, sizeof(float));
}

std::int32_t KernelLaunch::I32(std::size_t i) const {
  return std::get<std::int32_t>(literals_[i].value);
}
std::int64_t KernelLaunch::I64(std::size_t i) const {
  return std::get<std::int64_t>(literals_[i].value);
}
float KernelLaunch::F32(std::size_t i) const {
  return std::get<float>(literals_[i].value);
}
double KernelLaunch::F64(std::size_t i) const {
  return std::get<double>(literals_[i].value);
}

std::uint64_t KernelLaunch::Count(std::size_t i) const {
  const std::int32_t n = I32(i);
  if (n < 0) {
    throw KaasError(ErrorKind::kBackendFault,
                    "negative element count " + std::to_string(n));
  }
  return static_cast<std::uint64_t>(n);
}

void KernelRegistry::Register(std::string kernel_id, KernelImpl impl) {
  if (kernels_.count(kernel_id) != 0) {
    throw KaasError(ErrorKind::kDuplicateKernel,
                    "kernel \"" + kernel_id + "\" already registered");
  }
  kernels_.emplace(std::move(kernel_id), std::move(impl));
}

const KernelImpl* KernelRegistry::Find(std::string_view kernel_id) const {
  auto it = kernels_.find(kernel_id);
  return it == kernels_.end() ? nullptr : &it->second;
}

std::vector<std::string> KernelRegistry::Ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, impl] : kernels_) ids.push_back(id);
  return ids;
}

namespace {

using LT = LiteralType;
using BA = BufferAccess;

std::uint64_t SaturatingMul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

std::uint64_t VectorAdd(const KernelLaunch& l) {
  const std::uint64_t n = l.Count(0);
  const FloatView x = l.Floats(0), y = l.Floats(1), out = l.Floats(2);
  l.ForEachThread(n, [&](std::uint64_t g) { out.Store(g, x.Load(g) + y.Load(g)); });
  return n;
}

std::uint64_t Saxpy(const KernelLaunch& l) {
  const std::uint64_t n = l.Count(0);
  const float a = l.F32(1);
  const FloatView x = l.Floats(0), y = l.Floats(1), out = l.Floats(2);
  l.ForEachThread(n, [&](std::uint64_t g) {
    const float ax = a * x.Load(g);
    out.Store(g, ax + y.Load(g));
  });
  return n;
}

// A is n×k, B is k×m, OUT is n×m, all row-major. One thread per output cell;
// the inner product accumulates in ascending index order in one f32.
std::uint64_t Matmul(const KernelLaunch& l) {
  const std::uint64_t n = l.Count(0), m = l.Count(1), k = l.Count(2);
  const FloatView a = l.Floats(0), b = l.Floats(1), out = l.Floats(2);
  l.ForEachThread(n * m, [&](std::uint64_t g) {
    const std::uint64_t row = g / m, col = g % m;
    float acc = 0.0f;
    for (std::uint64_t p = 0; p < k; ++p) {
      const float prod = a.Load(row * k + p) * b.Load(p * m + col);
      acc = acc + prod;
    }
    out.Store(g, acc);
  });
  return SaturatingMul(SaturatingMul(n, m), k);
}

std::uint64_t ReduceSum(const KernelLaunch& l) {
  const std::uint64_t n = l.Count(0);
  const FloatView x = l.Floats(0), out = l.Floats(1);
  l.ForEachThread(1, [&](std::uint64_t) {
    float acc = 0.0f;
    for (std::uint64_t i = 0; i < n; ++i) acc = acc + x.Load(i);
    out.Store(0, acc);
  });
  return n;
}

std::uint64_t Fill(const KernelLaunch& l) {
  const std::uint64_t n = l.Count(0);
  const float v = l.F32(1);
  const FloatView out = l.Floats(0);
  l.ForEachThread(n, [&](std::uint64_t g) { out.Store(g, v); });
  return n;
}

}  // namespace

KernelRegistry KernelRegistry::WithBuiltins() {
  KernelRegistry r;
  r.Register("vector_add", {{{LT::kI32}, {BA::kRead, BA::kRead, BA::kWrite}},
                            VectorAdd});
  r.Register("saxpy", {{{LT::kI32, LT::kF32}, {BA::kRead, BA::kRead, BA::kWrite}},
                       Saxpy});
  r.Register("matmul", {{{LT::kI32, LT::kI32, LT::kI32},
                         {BA::kRead, BA::kRead, BA::kWrite}},
                        Matmul});
  r.Register("reduce_sum", {{{LT::kI32}, {BA::kRead, BA::kWrite}}, ReduceSum});
  r.Register("fill", {{{LT::kI32, LT::kF32}, {BA::kWrite}}, Fill});
  return r;
}

void CheckArity(std::string_view kernel_id, const KernelSignature& sig,
                std::span<const ScalarLiteral> literals, std::size_t buffers) {
  auto fail = [&](const std::string& what) {
    throw KaasError(ErrorKind::kArityMismatch,
                    "kernel \"" + std::string(kernel_id) + "\": " + what);
  };
  if (literals.size() != sig.literals.size()) {
    fail("expected " + std::to_string(sig.literals.size()) + " literals, got " +
         std::to_string(literals.size()));
  }
  for (std::size_t i = 0; i < literals.size(); ++i) {
    if (literals[i].type() != sig.literals[i]) {
      fail("literal " + std::to_string(i) + " must be " +
           std::string(LiteralTypeName(sig.literals[i])) + ", got " +
           std::string(LiteralTypeName(literals[i].type())));
    }
  }
  if (buffers != sig.buffers.size()) {
    fail("expected " + std::to_string(sig.buffers.size()) + " buffers, got " +
         std::to_string(buffers));
  }
}

SimulatedBackend::SimulatedBackend(
    std::shared_ptr<const KernelRegistry> registry, TimingModel timing)
    : registry_(std::move(registry)), timing_(timing) {}

const KernelSignature* SimulatedBackend::Signature(
    std::string_view kernel_id) const {
  const KernelImpl* impl = registry_->Find(kernel_id);
  return impl == nullptr ? nullptr : &impl->signature;
}

LaunchResult SimulatedBackend::Launch(
    std::string_view kernel_id, const LaunchDims& dims,
    std::span<const ScalarLiteral> literals,
    std::span<const std::span<std::byte>> buffers) {
  const KernelImpl* impl = registry_->Find(kernel_id);
  if (impl == nullptr) {
    throw KaasError(ErrorKind::kUnknownKernel,
                    "unknown kernel \"" + std::string(kernel_id) + "\"");
  }
  CheckArity(kernel_id, impl->signature, literals, buffers.size());
  LaunchResult result;
  result.fma_count = impl->run(KernelLaunch(dims, literals, buffers));
  result.compute_time = timing_.ComputeTime(result.fma_count);
  return result;
}

}  // namespace kaas
