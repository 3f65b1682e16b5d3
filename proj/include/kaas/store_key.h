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

#ifndef KAAS_STORE_KEY_H_
#define KAAS_STORE_KEY_H_

#include <cstddef>
#include <string>
#include <string_view>

namespace kaas {

inline constexpr std::size_t kMaxStoreKeyLength = 256;

/// Non-empty, at most 256 characters, charset [A-Za-z0-9._/-].
bool IsValidStoreKey(std::string_view key);

/// Throws KaasError(kInvalidKey) unless `IsValidStoreKey(key)`.
void CheckStoreKey(std::string_view key);

}  // namespace kaas

#endif  // KAAS_STORE_KEY_H_
