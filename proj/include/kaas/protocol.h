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

#ifndef KAAS_PROTOCOL_H_
#define KAAS_PROTOCOL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kaas/error.h"
#include "kaas/virtual_time.h"

namespace kaas {

/// Kernel launch geometry. Stored signed so that out-of-range values
/// survive decoding and are reported by `ValidateRequest`.
struct LaunchDims {
  std::int64_t grid_x = 1;
  std::int64_t grid_y = 1;
  std::int64_t grid_z = 1;
  std::int64_t block_x = 1;
  std::int64_t block_y = 1;
  std::int64_t block_z = 1;

  /// Product of all six components. Only meaningful for valid dims.
  std::uint64_t TotalThreads() const;

  friend bool operator==(const LaunchDims&, const LaunchDims&) = default;
};

inline constexpr std::uint64_t kMaxLogicalThreads = std::uint64_t{1} << 32;

enum class LiteralType { kI32, kI64, kF32, kF64 };

/// Tagged scalar kernel argument. Equality is bitwise on floats except that
/// any two NaNs compare equal (the wire format does not carry NaN payloads).
struct ScalarLiteral {
  std::variant<std::int32_t, std::int64_t, float, double> value;

  LiteralType type() const { return static_cast<LiteralType>(value.index()); }

  static ScalarLiteral I32(std::int32_t v) { return {v}; }
  static ScalarLiteral I64(std::int64_t v) { return {v}; }
  static ScalarLiteral F32(float v) { return {v}; }
  static ScalarLiteral F64(double v) { return {v}; }

  friend bool operator==(const ScalarLiteral& a, const ScalarLiteral& b);
};

enum class Direction { kInput, kOutput, kInout };

struct BufferArg {
  std::string name;
  std::optional<std::string> key;
  std::uint64_t size = 0;
  bool is_const = false;
  bool is_ephemeral = false;
  Direction direction = Direction::kInput;

  friend bool operator==(const BufferArg&, const BufferArg&) = default;
};

struct KernelInvocation {
  std::string kernel_id;
  LaunchDims dims;
  std::vector<ScalarLiteral> literals;
  /// Buffer names, resolved against the enclosing request's buffer table.
  std::vector<std::string> args;

  friend bool operator==(const KernelInvocation&,
                         const KernelInvocation&) = default;
};

/// The unit of submission. `buffers` keeps the client's order, which is also
/// the order in which the executor resolves them.
struct KaasRequest {
  std::string request_id;
  std::vector<BufferArg> buffers;
  std::vector<KernelInvocation> invocations;

  const BufferArg* FindBuffer(std::string_view name) const;

  friend bool operator==(const KaasRequest&, const KaasRequest&) = default;
};

struct InvocationTiming {
  std::string kernel_id;
  VirtualDuration simulated_compute_time{0};
  VirtualDuration launch_overhead{0};

  friend bool operator==(const InvocationTiming&,
                         const InvocationTiming&) = default;
};

struct IoStats {
  std::uint64_t store_gets = 0;
  std::uint64_t store_puts = 0;
  std::uint64_t bytes_fetched = 0;
  std::uint64_t bytes_flushed = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;

  IoStats& operator+=(const IoStats& o);
  friend bool operator==(const IoStats&, const IoStats&) = default;
};

struct ResponseError {
  ErrorKind kind = ErrorKind::kInvalidRequest;
  std::string message;

  friend bool operator==(const ResponseError&, const ResponseError&) = default;
};

struct KaasResponse {
  std::string request_id;
  /// Empty means ok.
  std::optional<ResponseError> error;
  std::vector<InvocationTiming> per_invocation;
  IoStats io_stats;
  VirtualDuration simulated_total_time{0};

  bool ok() const { return !error.has_value(); }

  static KaasResponse Failure(std::string request_id, ErrorKind kind,
                              std::string message);

  friend bool operator==(const KaasResponse&, const KaasResponse&) = default;
};

/// One violated invariant. `subject` names the offending buffer or
/// invocation (e.g. "buffer a", "invocation 2"); empty for request-level.
struct Violation {
  std::string subject;
  std::string message;
};

/// Checks every structural invariant of `req`. Empty result means valid.
std::vector<Violation> ValidateRequest(const KaasRequest& req);

/// Joins violations into one human-readable line.
std::string DescribeViolations(const std::vector<Violation>& violations);

std::string_view DirectionName(Direction d);
std::string_view LiteralTypeName(LiteralType t);

}  // namespace kaas

#endif  // KAAS_PROTOCOL_H_
