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

#ifndef KAAS_ERROR_H_
#define KAAS_ERROR_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kaas {

/// Failure categories shared by every component. The string form of each
/// kind is part of the wire format (see `ErrorKindName`).
enum class ErrorKind {
  kInvalidRequest,
  kParseError,
  kSchemaError,
  kInvalidKey,
  kNotFound,
  kStoreIo,
  kSizeMismatch,
  kOutOfDeviceMemory,
  kBufferBusy,
  kUnknownKernel,
  kArityMismatch,
  kBackendFault,
  kDuplicateKernel,
  kNoExecutors,
  kUnknownExecutor,
  kInvalidConfig,
  kInvalidWorkload,
};

std::string_view ErrorKindName(ErrorKind kind);
std::optional<ErrorKind> ParseErrorKind(std::string_view name);

class KaasError : public std::runtime_error {
 public:
  KaasError(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace kaas

#endif  // KAAS_ERROR_H_
