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

#ifndef KAAS_BACKEND_H_
#define KAAS_BACKEND_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kaas/protocol.h"
#include "kaas/timing.h"

namespace kaas {

enum class BufferAccess { kRead, kWrite, kReadWrite };

inline bool Writes(BufferAccess a) { return a != BufferAccess::kRead; }

/// Arity contract of a kernel: literal types in order, and how each buffer
/// parameter is accessed.
struct KernelSignature {
  std::vector<LiteralType> literals;
  std::vector<BufferAccess> buffers;
};

/// Bounds-checked little-endian f32 view over a device buffer. Out-of-range
/// accesses throw kBackendFault.
class FloatView {
 public:
  FloatView(std::span<std::byte> bytes, std::size_t param)
      : bytes_(bytes), param_(param) {}

  std::size_t size() const { return bytes_.size() / sizeof(float); }
  float Load(std::uint64_t i) const;
  void Store(std::uint64_t i, float v) const;

 private:
  [[noreturn]] void Fault(std::uint64_t i) const;

  std::span<std::byte> bytes_;
  std::size_t param_;
};

/// Arguments of one kernel launch as seen by a kernel implementation.
class KernelLaunch {
 public:
  KernelLaunch(const LaunchDims& dims, std::span<const ScalarLiteral> literals,
               std::span<const std::span<std::byte>> buffers)
      : dims_(dims), literals_(literals), buffers_(buffers) {}

  const LaunchDims& dims() const { return dims_; }
  std::uint64_t total_threads() const { return dims_.TotalThreads(); }

  std::int32_t I32(std::size_t i) const;
  std::int64_t I64(std::size_t i) const;
  float F32(std::size_t i) const;
  double F64(std::size_t i) const;

  /// Reads an i32 element-count literal; negative counts fault.
  std::uint64_t Count(std::size_t i) const;

  FloatView Floats(std::size_t i) const { return {buffers_[i], i}; }
  std::span<std::byte> Raw(std::size_t i) const { return buffers_[i]; }

  /// Runs `body(g)` for every global thread id g in ascending order, skipping
  /// the no-op threads with g >= n.
  template <typename Body>
  void ForEachThread(std::uint64_t n, Body&& body) const {
    const std::uint64_t limit = std::min<std::uint64_t>(n, total_threads());
    for (std::uint64_t g = 0; g < limit; ++g) body(g);
  }

 private:
  LaunchDims dims_;
  std::span<const ScalarLiteral> literals_;
  std::span<const std::span<std::byte>> buffers_;
};

/// Applies the kernel and returns its fused multiply-add count.
using KernelFn = std::function<std::uint64_t(const KernelLaunch&)>;

struct KernelImpl {
  KernelSignature signature;
  KernelFn run;
};

/// Maps kernel ids to implementations. Built once at startup and shared
/// read-only between executors.
class KernelRegistry {
 public:
  /// Throws kDuplicateKernel if `kernel_id` is taken.
  void Register(std::string kernel_id, KernelImpl impl);
  const KernelImpl* Find(std::string_view kernel_id) const;
  std::vector<std::string> Ids() const;

  /// vector_add, saxpy, matmul, reduce_sum and fill.
  static KernelRegistry WithBuiltins();

 private:
  std::map<std::string, KernelImpl, std::less<>> kernels_;
};

/// Throws kArityMismatch when literal types or buffer count disagree.
void CheckArity(std::string_view kernel_id, const KernelSignature& sig,
                std::span<const ScalarLiteral> literals, std::size_t buffers);

struct LaunchResult {
  std::uint64_t fma_count = 0;
  VirtualDuration compute_time{0};
};

/// Kernel execution engine owned by one executor.
class Backend {
 public:
  virtual ~Backend() = default;

  /// nullptr for unknown kernels.
  virtual const KernelSignature* Signature(std::string_view kernel_id) const = 0;

  /// Throws kUnknownKernel, kArityMismatch or kBackendFault.
  virtual LaunchResult Launch(std::string_view kernel_id,
                              const LaunchDims& dims,
                              std::span<const ScalarLiteral> literals,
                              std::span<const std::span<std::byte>> buffers) = 0;
};

/// Executes registry kernels on host memory standing in for device memory,
/// charging compute time from the timing model's FMA rate.
class SimulatedBackend final : public Backend {
 public:
  SimulatedBackend(std::shared_ptr<const KernelRegistry> registry,
                   TimingModel timing);

  const KernelSignature* Signature(std::string_view kernel_id) const override;
  LaunchResult Launch(std::string_view kernel_id, const LaunchDims& dims,
                      std::span<const ScalarLiteral> literals,
                      std::span<const std::span<std::byte>> buffers) override;

 private:
  std::shared_ptr<const KernelRegistry> registry_;
  TimingModel timing_;
};

}  // namespace kaas

#endif  // KAAS_BACKEND_H_
