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

#include "kaas/error.h"

#include <array>
#include <utility>

namespace kaas {
namespace {

constexpr std::array<std::pair<ErrorKind, std::string_view>, 17> kNames{{
    {ErrorKind::kInvalidRequest, "InvalidRequest"},
    {ErrorKind::kParseError, "ParseError"},
    {ErrorKind::kSchemaError, "SchemaError"},
    {ErrorKind::kInvalidKey, "InvalidKey"},
    {ErrorKind::kNotFound, "NotFound"},
    {ErrorKind::kStoreIo, "StoreIo"},
    {ErrorKind::kSizeMismatch, "SizeMismatch"},
    {ErrorKind::kOutOfDeviceMemory, "OutOfDeviceMemory"},
    {ErrorKind::kBufferBusy, "BufferBusy"},
    {ErrorKind::kUnknownKernel, "UnknownKernel"},
    {ErrorKind::kArityMismatch, "ArityMismatch"},
    {ErrorKind::kBackendFault, "BackendFault"},
    {ErrorKind::kDuplicateKernel, "DuplicateKernel"},
    {ErrorKind::kNoExecutors, "NoExecutors"},
    {ErrorKind::kUnknownExecutor, "UnknownExecutor"},
    {ErrorKind::kInvalidConfig, "InvalidConfig"},
    {ErrorKind::kInvalidWorkload, "InvalidWorkload"},
}};

}  // namespace

std::string_view ErrorKindName(ErrorKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "Unknown";
}

std::optional<ErrorKind> ParseErrorKind(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

}  // namespace kaas
