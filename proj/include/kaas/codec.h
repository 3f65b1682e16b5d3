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

#ifndef KAAS_CODEC_H_
#define KAAS_CODEC_H_

#include <string>
#include <string_view>

#include "kaas/protocol.h"

namespace kaas {

/// Strict decoding rejects unknown object fields with kSchemaError;
/// lenient decoding ignores them.
enum class SchemaMode { kStrict, kLenient };

/// Canonical UTF-8 JSON encoding. Durations are integer virtual picoseconds.
std::string EncodeRequest(const KaasRequest& req);
std::string EncodeResponse(const KaasResponse& resp);

/// Throws KaasError with kParseError for malformed JSON and kSchemaError for
/// well-formed JSON that does not match the schema.
KaasRequest DecodeRequest(std::string_view bytes,
                          SchemaMode mode = SchemaMode::kStrict);
KaasResponse DecodeResponse(std::string_view bytes,
                            SchemaMode mode = SchemaMode::kStrict);

}  // namespace kaas

#endif  // KAAS_CODEC_H_
