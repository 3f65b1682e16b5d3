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

#include "kaas/server.h"

#include <cctype>
#include <charconv>
#include <span>

#include "httplib.h"
#include "json.hpp"
#include "kaas/error.h"

namespace kaas {

std::uint64_t ParseByteSize(std::string_view text) {
  std::uint64_t multiplier = 1;
  std::string_view digits = text;
  for (auto [suffix, mult] :
       {std::pair<std::string_view, std::uint64_t>{"KiB", 1ULL << 10},
        {"MiB", 1ULL << 20},
        {"GiB", 1ULL << 30}}) {
    if (text.ends_with(suffix)) {
      digits = text.substr(0, text.size() - suffix.size());
      multiplier = mult;
      break;
    }
  }
  std::uint64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (digits.empty() || ec != std::errc() ||
      ptr != digits.data() + digits.size()) {
    throw KaasError(ErrorKind::kInvalidConfig,
                    "bad byte size \"" + std::string(text) + "\"");
  }
  if (value != 0 && multiplier > UINT64_MAX / value) {
    throw KaasError(ErrorKind::kInvalidConfig,
                    "byte size overflows: \"" + std::string(text) + "\"");
  }
  return value * multiplier;
}

std::string EncodeStats(const std::vector<ExecutorStats>& stats) {
  nlohmann::ordered_json j;
  j["executors"] = nlohmann::ordered_json::array();
  for (const auto& s : stats) {
    j["executors"].push_back({{"executor_id", s.executor_id},
                              {"used_bytes", s.used_bytes},
                              {"entries", s.entries},
                              {"cache_hits", s.cache_hits},
                              {"cache_misses", s.cache_misses},
                              {"requests", s.requests},
                              {"busy_time", s.busy_time.count()},
                              {"compute_time", s.compute_time.count()}});
  }
  return j.dump();
}

namespace {

int InvokeStatus(const KaasResponse& resp) {
  if (resp.ok()) return 200;
  switch (resp.error->kind) {
    case ErrorKind::kParseError:
    case ErrorKind::kSchemaError:
    case ErrorKind::kInvalidRequest:
      return 400;
    default:
      return 200;
  }
}

}  // namespace

KaasServer::KaasServer(const ServerConfig& config,
                       std::shared_ptr<ObjectStore> store)
    : config_(config),
      fleet_(config.fleet, std::move(store)),
      http_(std::make_unique<httplib::Server>()) {
  InstallRoutes();
}

KaasServer::~KaasServer() { Stop(); }

void KaasServer::InstallRoutes() {
  http_->Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });

  http_->Get("/v1/stats", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(EncodeStats(fleet_.Stats()), "application/json");
  });

  http_->Post("/v1/invoke", [this](const httplib::Request& req,
                                   httplib::Response& res) {
    KaasResponse resp;
    try {
      resp = fleet_.Submit(DecodeRequest(req.body, config_.schema));
    } catch (const KaasError& e) {
      resp = KaasResponse::Failure("", e.kind(), e.what());
    }
    res.status = InvokeStatus(resp);
    res.set_content(EncodeResponse(resp), "application/json");
  });

  auto with_key = [](const httplib::Request& req, httplib::Response& res,
                     auto&& body) {
    try {
      body(req.matches[1].str());
    } catch (const KaasError& e) {
      switch (e.kind()) {
        case ErrorKind::kInvalidKey:
          res.status = 400;
          break;
        case ErrorKind::kNotFound:
          res.status = 404;
          break;
        default:
          res.status = 500;
      }
      res.set_content(std::string(ErrorKindName(e.kind())) + ": " + e.what(),
                      "text/plain");
    }
  };

  http_->Put(R"(/v1/objects/(.+))", [this, with_key](const httplib::Request& req,
                                                     httplib::Response& res) {
    with_key(req, res, [&](const std::string& key) {
      const auto* data = reinterpret_cast<const std::byte*>(req.body.data());
      fleet_.store().Put(key, std::span(data, req.body.size()));
      res.status = 204;
    });
  });

  http_->Get(R"(/v1/objects/(.+))", [this, with_key](const httplib::Request& req,
                                                     httplib::Response& res) {
    with_key(req, res, [&](const std::string& key) {
      const Bytes data = fleet_.store().Get(key);
      res.set_content(std::string(reinterpret_cast<const char*>(data.data()),
                                  data.size()),
                      "application/octet-stream");
    });
  });

  http_->Delete(R"(/v1/objects/(.+))",
                [this, with_key](const httplib::Request& req,
                                 httplib::Response& res) {
                  with_key(req, res, [&](const std::string& key) {
                    fleet_.store().Delete(key);
                    res.status = 204;
                  });
                });
}

int KaasServer::Bind(const std::string& host, int port) {
  const int bound = port == 0 ? http_->bind_to_any_port(host)
                              : (http_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw KaasError(ErrorKind::kInvalidConfig,
                    "cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void KaasServer::Listen() { http_->listen_after_bind(); }

void KaasServer::Stop() {
  if (http_ && http_->is_running()) http_->stop();
}

void KaasServer::WaitUntilReady() const { http_->wait_until_ready(); }

}  // namespace kaas
