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

#include "kaas/protocol.h"

#include <bit>
#include <cmath>
#include <set>
#include <string_view>
#include <unordered_map>

#include "kaas/store_key.h"

namespace kaas {

void VirtualClock::Advance(VirtualDuration d) {
  if (d.count() < 0) {
    throw std::logic_error("virtual clock cannot move backwards");
  }
  now_ += d;
}

std::uint64_t LaunchDims::TotalThreads() const {
  return static_cast<std::uint64_t>(grid_x) * grid_y * grid_z * block_x *
         block_y * block_z;
}

namespace {

template <typename F>
bool SameFloat(F a, F b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return std::bit_cast<std::conditional_t<sizeof(F) == 4, std::uint32_t,
                                          std::uint64_t>>(a) ==
         std::bit_cast<std::conditional_t<sizeof(F) == 4, std::uint32_t,
                                          std::uint64_t>>(b);
}

// Product of the six components is <= 2^32, checked without overflow.
bool ThreadCountInRange(const LaunchDims& d) {
  std::uint64_t total = 1;
  for (std::int64_t c : {d.grid_x, d.grid_y, d.grid_z, d.block_x, d.block_y,
                         d.block_z}) {
    auto factor = static_cast<std::uint64_t>(c);
    if (factor > kMaxLogicalThreads / total) {
      return false;
    }
    total *= factor;
  }
  return true;
}

}  // namespace

bool operator==(const ScalarLiteral& a, const ScalarLiteral& b) {
  if (a.value.index() != b.value.index()) return false;
  return std::visit(
      [&](auto x) {
        using T = decltype(x);
        T y = std::get<T>(b.value);
        if constexpr (std::is_floating_point_v<T>) {
          return SameFloat(x, y);
        } else {
          return x == y;
        }
      },
      a.value);
}

const BufferArg* KaasRequest::FindBuffer(std::string_view name) const {
  for (const auto& b : buffers) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

IoStats& IoStats::operator+=(const IoStats& o) {
  store_gets += o.store_gets;
  store_puts += o.store_puts;
  bytes_fetched += o.bytes_fetched;
  bytes_flushed += o.bytes_flushed;
  cache_hits += o.cache_hits;
  cache_misses += o.cache_misses;
  return *this;
}

KaasResponse KaasResponse::Failure(std::string request_id, ErrorKind kind,
                                   std::string message) {
  KaasResponse resp;
  resp.request_id = std::move(request_id);
  resp.error = ResponseError{kind, std::move(message)};
  return resp;
}

std::vector<Violation> ValidateRequest(const KaasRequest& req) {
  std::vector<Violation> out;
  if (req.request_id.empty()) {
    out.push_back({"", "request_id is empty"});
  }

  std::set<std::string_view> names;
  // key -> is_const of the first non-ephemeral buffer bound to it.
  std::unordered_map<std::string_view, bool> keys;
  for (const auto& b : req.buffers) {
    const std::string subject = "buffer " + b.name;
    if (b.name.empty()) out.push_back({subject, "buffer name is empty"});
    if (!names.insert(b.name).second) {
      out.push_back({subject, "duplicate buffer name " + b.name});
    }
    if (b.size == 0) out.push_back({subject, "size must be positive"});
    if (b.is_const && b.is_ephemeral) {
      out.push_back({subject, "const∧ephemeral forbidden"});
    }
    if (b.is_const && b.direction != Direction::kInput) {
      out.push_back({subject, "const buffer must have direction input"});
    }
    if (b.is_ephemeral && b.key.has_value()) {
      out.push_back({subject, "ephemeral buffer must not have a key"});
    }
    if (!b.is_ephemeral) {
      if (!b.key.has_value()) {
        out.push_back({subject, "non-ephemeral buffer requires a key"});
      } else if (!IsValidStoreKey(*b.key)) {
        out.push_back({subject, "invalid store key " + *b.key});
      } else {
        auto [it, inserted] = keys.emplace(*b.key, b.is_const);
        if (!inserted) {
          if (!(it->second && b.is_const)) {
            out.push_back({subject, "key " + *b.key +
                                        " bound twice; only allowed when "
                                        "both buffers are const"});
          }
        }
      }
    }
  }

  for (std::size_t i = 0; i < req.invocations.size(); ++i) {
    const auto& inv = req.invocations[i];
    const std::string subject = "invocation " + std::to_string(i);
    if (inv.kernel_id.empty()) out.push_back({subject, "kernel_id is empty"});
    const auto& d = inv.dims;
    if (d.grid_x < 1 || d.grid_y < 1 || d.grid_z < 1 || d.block_x < 1 ||
        d.block_y < 1 || d.block_z < 1) {
      out.push_back({subject, "launch dims must all be >= 1"});
    } else if (!ThreadCountInRange(d)) {
      out.push_back({subject, "total threads exceed 2^32"});
    }
    for (const auto& a : inv.args) {
      if (names.count(a) == 0) {
        out.push_back({subject, "unknown buffer " + a});
      }
    }
  }
  return out;
}

std::string DescribeViolations(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    if (!v.subject.empty()) out += v.subject + ": ";
    out += v.message;
  }
  return out;
}

std::string_view DirectionName(Direction d) {
  switch (d) {
    case Direction::kInput:
      return "input";
    case Direction::kOutput:
      return "output";
    case Direction::kInout:
      return "inout";
  }
  return "input";
}

std::string_view LiteralTypeName(LiteralType t) {
  switch (t) {
    case LiteralType::kI32:
      return "i32";
    case LiteralType::kI64:
      return "i64";
    case LiteralType::kF32:
      return "f32";
    case LiteralType::kF64:
      return "f64";
  }
  return "i32";
}

}  // namespace kaas
