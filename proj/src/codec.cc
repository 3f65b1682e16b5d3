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

#include "kaas/codec.h"

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string>

#include "json.hpp"

namespace kaas {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void SchemaFail(const std::string& where, const std::string& what) {
  throw KaasError(ErrorKind::kSchemaError, where + ": " + what);
}

Json Parse(std::string_view bytes) {
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::exception& e) {
    // Includes number overflow, which the library reports as out_of_range.
    throw KaasError(ErrorKind::kParseError, e.what());
  }
}

// Field access with the path of the enclosing object for error messages.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path, SchemaMode mode,
               std::initializer_list<std::string_view> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j.is_object()) SchemaFail(path_, "expected an object");
    if (mode == SchemaMode::kStrict) {
      for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (auto a : allowed) known = known || a == k;
        if (!known) SchemaFail(path_, "unknown field \"" + k + "\"");
      }
    }
  }

  const std::string& path() const { return path_; }

  const Json* Find(std::string_view field) const {
    auto it = j_.find(field);
    if (it == j_.end()) return nullptr;
    return &*it;
  }

  const Json& Required(std::string_view field) const {
    const Json* v = Find(field);
    if (v == nullptr) {
      SchemaFail(path_, "missing field \"" + std::string(field) + "\"");
    }
    return *v;
  }

  std::string String(std::string_view field) const {
    const Json& v = Required(field);
    if (!v.is_string()) SchemaFail(Sub(field), "expected a string");
    return v.get<std::string>();
  }

  std::uint64_t Unsigned(std::string_view field) const {
    const Json& v = Required(field);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    SchemaFail(Sub(field), "expected a non-negative integer");
  }

  std::int64_t Signed(std::string_view field) const {
    return ToInt64(Required(field), Sub(field));
  }

  bool Flag(std::string_view field) const {
    const Json* v = Find(field);
    if (v == nullptr) return false;
    if (!v->is_boolean()) SchemaFail(Sub(field), "expected a boolean");
    return v->get<bool>();
  }

  const Json& Array(std::string_view field) const {
    const Json& v = Required(field);
    if (!v.is_array()) SchemaFail(Sub(field), "expected an array");
    return v;
  }

  std::string Sub(std::string_view field) const {
    return path_ + "." + std::string(field);
  }

  static std::int64_t ToInt64(const Json& v, const std::string& where) {
    if (v.is_number_unsigned()) {
      auto u = v.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(
                  std::numeric_limits<std::int64_t>::max())) {
        SchemaFail(where, "integer out of range");
      }
      return static_cast<std::int64_t>(u);
    }
    if (v.is_number_integer()) return v.get<std::int64_t>();
    SchemaFail(where, "expected an integer");
  }

 private:
  const Json& j_;
  std::string path_;
};

// ---- literals ----

template <typename F>
Json EncodeFloat(F f) {
  if (std::isnan(f)) return "NaN";
  if (std::isinf(f)) return f > 0 ? "Infinity" : "-Infinity";
  return static_cast<double>(f);
}

double DecodeFloat(const Json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
    if (s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
  }
  SchemaFail(where, "expected a number, \"NaN\", \"Infinity\" or \"-Infinity\"");
}

Json EncodeLiteral(const ScalarLiteral& lit) {
  Json j;
  j["type"] = std::string(LiteralTypeName(lit.type()));
  std::visit(
      [&](auto x) {
        using T = decltype(x);
        if constexpr (std::is_floating_point_v<T>) {
          j["value"] = EncodeFloat(x);
        } else {
          j["value"] = x;
        }
      },
      lit.value);
  return j;
}

ScalarLiteral DecodeLiteral(const Json& j, const std::string& path,
                            SchemaMode mode) {
  ObjectReader r(j, path, mode, {"type", "value"});
  const std::string type = r.String("type");
  const Json& v = r.Required("value");
  const std::string where = r.Sub("value");
  if (type == "i32") {
    std::int64_t x = ObjectReader::ToInt64(v, where);
    if (x < std::numeric_limits<std::int32_t>::min() ||
        x > std::numeric_limits<std::int32_t>::max()) {
      SchemaFail(where, "i32 out of range");
    }
    return ScalarLiteral::I32(static_cast<std::int32_t>(x));
  }
  if (type == "i64") return ScalarLiteral::I64(ObjectReader::ToInt64(v, where));
  if (type == "f32") {
    const double x = DecodeFloat(v, where);
    // Finite values that would round to infinity as f32.
    static const double kF32Overflow = std::ldexp(1.0, 128) - std::ldexp(1.0, 103);
    if (std::isfinite(x) && std::fabs(x) >= kF32Overflow) {
      SchemaFail(where, "f32 out of range");
    }
    return ScalarLiteral::F32(static_cast<float>(x));
  }
  if (type == "f64") return ScalarLiteral::F64(DecodeFloat(v, where));
  SchemaFail(r.Sub("type"), "unknown literal type \"" + type + "\"");
}

// ---- request ----

Json EncodeBuffer(const BufferArg& b) {
  Json j;
  j["name"] = b.name;
  if (b.key) j["key"] = *b.key;
  j["size"] = b.size;
  j["is_const"] = b.is_const;
  j["is_ephemeral"] = b.is_ephemeral;
  j["direction"] = std::string(DirectionName(b.direction));
  return j;
}

BufferArg DecodeBuffer(const Json& j, const std::string& path,
                       SchemaMode mode) {
  ObjectReader r(j, path, mode,
                 {"name", "key", "size", "is_const", "is_ephemeral",
                  "direction"});
  BufferArg b;
  b.name = r.String("name");
  if (const Json* k = r.Find("key"); k != nullptr && !k->is_null()) {
    if (!k->is_string()) SchemaFail(r.Sub("key"), "expected a string");
    b.key = k->get<std::string>();
  }
  b.size = r.Unsigned("size");
  b.is_const = r.Flag("is_const");
  b.is_ephemeral = r.Flag("is_ephemeral");
  const std::string dir = r.String("direction");
  if (dir == "input") {
    b.direction = Direction::kInput;
  } else if (dir == "output") {
    b.direction = Direction::kOutput;
  } else if (dir == "inout") {
    b.direction = Direction::kInout;
  } else {
    SchemaFail(r.Sub("direction"), "unknown direction \"" + dir + "\"");
  }
  return b;
}

Json EncodeInvocation(const KernelInvocation& inv) {
  Json j;
  j["kernel_id"] = inv.kernel_id;
  const auto& d = inv.dims;
  j["dims"] = {{"grid_x", d.grid_x},   {"grid_y", d.grid_y},
               {"grid_z", d.grid_z},   {"block_x", d.block_x},
               {"block_y", d.block_y}, {"block_z", d.block_z}};
  j["literals"] = Json::array();
  for (const auto& lit : inv.literals) j["literals"].push_back(EncodeLiteral(lit));
  j["args"] = inv.args;
  return j;
}

KernelInvocation DecodeInvocation(const Json& j, const std::string& path,
                                  SchemaMode mode) {
  ObjectReader r(j, path, mode, {"kernel_id", "dims", "literals", "args"});
  KernelInvocation inv;
  inv.kernel_id = r.String("kernel_id");
  ObjectReader d(r.Required("dims"), r.Sub("dims"), mode,
                 {"grid_x", "grid_y", "grid_z", "block_x", "block_y",
                  "block_z"});
  inv.dims = {d.Signed("grid_x"),  d.Signed("grid_y"),  d.Signed("grid_z"),
              d.Signed("block_x"), d.Signed("block_y"), d.Signed("block_z")};
  const Json& lits = r.Array("literals");
  for (std::size_t i = 0; i < lits.size(); ++i) {
    inv.literals.push_back(
        DecodeLiteral(lits[i], r.Sub("literals") + "[" + std::to_string(i) + "]",
                      mode));
  }
  const Json& args = r.Array("args");
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!args[i].is_string()) {
      SchemaFail(r.Sub("args") + "[" + std::to_string(i) + "]",
                 "expected a string");
    }
    inv.args.push_back(args[i].get<std::string>());
  }
  return inv;
}

// ---- response ----

Json EncodeIoStats(const IoStats& s) {
  return {{"store_gets", s.store_gets},       {"store_puts", s.store_puts},
          {"bytes_fetched", s.bytes_fetched}, {"bytes_flushed", s.bytes_flushed},
          {"cache_hits", s.cache_hits},       {"cache_misses", s.cache_misses}};
}

IoStats DecodeIoStats(const Json& j, const std::string& path, SchemaMode mode) {
  ObjectReader r(j, path, mode,
                 {"store_gets", "store_puts", "bytes_fetched", "bytes_flushed",
                  "cache_hits", "cache_misses"});
  IoStats s;
  s.store_gets = r.Unsigned("store_gets");
  s.store_puts = r.Unsigned("store_puts");
  s.bytes_fetched = r.Unsigned("bytes_fetched");
  s.bytes_flushed = r.Unsigned("bytes_flushed");
  s.cache_hits = r.Unsigned("cache_hits");
  s.cache_misses = r.Unsigned("cache_misses");
  return s;
}

}  // namespace

std::string EncodeRequest(const KaasRequest& req) {
  Json j;
  j["request_id"] = req.request_id;
  j["buffers"] = Json::array();
  for (const auto& b : req.buffers) j["buffers"].push_back(EncodeBuffer(b));
  j["invocations"] = Json::array();
  for (const auto& inv : req.invocations) {
    j["invocations"].push_back(EncodeInvocation(inv));
  }
  return j.dump();
}

KaasRequest DecodeRequest(std::string_view bytes, SchemaMode mode) {
  const Json j = Parse(bytes);
  ObjectReader r(j, "request", mode, {"request_id", "buffers", "invocations"});
  KaasRequest req;
  req.request_id = r.String("request_id");
  const Json& bufs = r.Array("buffers");
  for (std::size_t i = 0; i < bufs.size(); ++i) {
    req.buffers.push_back(DecodeBuffer(
        bufs[i], "request.buffers[" + std::to_string(i) + "]", mode));
  }
  const Json& invs = r.Array("invocations");
  for (std::size_t i = 0; i < invs.size(); ++i) {
    req.invocations.push_back(DecodeInvocation(
        invs[i], "request.invocations[" + std::to_string(i) + "]", mode));
  }
  return req;
}

std::string EncodeResponse(const KaasResponse& resp) {
  Json j;
  j["request_id"] = resp.request_id;
  if (resp.ok()) {
    j["status"] = "ok";
  } else {
    j["status"] = {{"error",
                    {{"kind", std::string(ErrorKindName(resp.error->kind))},
                     {"message", resp.error->message}}}};
  }
  j["per_invocation"] = Json::array();
  for (const auto& t : resp.per_invocation) {
    j["per_invocation"].push_back(
        {{"kernel_id", t.kernel_id},
         {"simulated_compute_time", t.simulated_compute_time.count()},
         {"launch_overhead", t.launch_overhead.count()}});
  }
  j["io_stats"] = EncodeIoStats(resp.io_stats);
  j["simulated_total_time"] = resp.simulated_total_time.count();
  return j.dump();
}

KaasResponse DecodeResponse(std::string_view bytes, SchemaMode mode) {
  const Json j = Parse(bytes);
  ObjectReader r(j, "response", mode,
                 {"request_id", "status", "per_invocation", "io_stats",
                  "simulated_total_time"});
  KaasResponse resp;
  resp.request_id = r.String("request_id");
  const Json& status = r.Required("status");
  if (status.is_string()) {
    if (status.get<std::string>() != "ok") {
      SchemaFail(r.Sub("status"), "expected \"ok\" or an error object");
    }
  } else {
    ObjectReader s(status, r.Sub("status"), mode, {"error"});
    ObjectReader e(s.Required("error"), s.Sub("error"), mode,
                   {"kind", "message"});
    const std::string kind = e.String("kind");
    auto parsed = ParseErrorKind(kind);
    if (!parsed) SchemaFail(e.Sub("kind"), "unknown error kind \"" + kind + "\"");
    resp.error = ResponseError{*parsed, e.String("message")};
  }
  const Json& per = r.Array("per_invocation");
  for (std::size_t i = 0; i < per.size(); ++i) {
    ObjectReader t(per[i], r.Sub("per_invocation") + "[" + std::to_string(i) + "]",
                   mode, {"kernel_id", "simulated_compute_time", "launch_overhead"});
    resp.per_invocation.push_back(
        {t.String("kernel_id"), VirtualDuration(t.Signed("simulated_compute_time")),
         VirtualDuration(t.Signed("launch_overhead"))});
  }
  resp.io_stats = DecodeIoStats(r.Required("io_stats"), r.Sub("io_stats"), mode);
  resp.simulated_total_time = VirtualDuration(r.Signed("simulated_total_time"));
  return resp;
}

}  // namespace kaas
