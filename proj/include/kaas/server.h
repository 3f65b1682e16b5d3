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

#ifndef KAAS_SERVER_H_
#define KAAS_SERVER_H_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "kaas/codec.h"
#include "kaas/fleet.h"
#include "kaas/object_store.h"

namespace httplib {
class Server;
}

namespace kaas {

/// Parses a byte count with an optional KiB, MiB or GiB suffix.
/// Throws kInvalidConfig.
std::uint64_t ParseByteSize(std::string_view text);

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store = "mem";
  FleetConfig fleet;
  SchemaMode schema = SchemaMode::kLenient;
};

/// HTTP front end:
///   POST /v1/invoke             encoded KaasRequest -> encoded KaasResponse
///   GET  /v1/health             "ok"
///   GET  /v1/stats              per-executor cache and request counters
///   PUT|GET|DELETE /v1/objects/<key>   raw object bytes
class KaasServer {
 public:
  /// Throws kInvalidConfig.
  KaasServer(const ServerConfig& config, std::shared_ptr<ObjectStore> store);
  ~KaasServer();

  /// Binds the listening socket; port 0 picks a free port. Returns the bound
  /// port. Throws kInvalidConfig when the bind fails.
  int Bind(const std::string& host, int port);
  /// Serves until `Stop`. Requires a successful `Bind`.
  void Listen();
  void Stop();
  /// Blocks until the server is accepting connections.
  void WaitUntilReady() const;

  Fleet& fleet() { return fleet_; }

 private:
  void InstallRoutes();

  ServerConfig config_;
  Fleet fleet_;
  std::unique_ptr<httplib::Server> http_;
};

/// Encodes `Fleet::Stats` as the /v1/stats JSON body.
std::string EncodeStats(const std::vector<ExecutorStats>& stats);

}  // namespace kaas

#endif  // KAAS_SERVER_H_
