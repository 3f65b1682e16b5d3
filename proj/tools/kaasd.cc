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

// kaasd: the kernel execution server.
//
//   kaasd serve --port 8080 --store mem --executors 4 --capacity 256MiB
//               --policy affinity:8 --timing timing.json --strict-schema

#include <csignal>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "kaas/error.h"
#include "kaas/object_store.h"
#include "kaas/router.h"
#include "kaas/server.h"
#include "kaas/timing.h"

int main(int argc, char** argv) {
  CLI::App app{"Kernel execution server"};
  app.require_subcommand(1);
  CLI::App* serve = app.add_subcommand("serve", "Run the HTTP server");

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store_spec = "mem";
  std::size_t executors = 1;
  std::string capacity = "256MiB";
  std::string policy = "affinity:8";
  std::size_t digest_cap = 1024;
  std::string timing_path;
  bool strict = false;
  std::optional<double> h2d, d2h, fetch_latency, launch_overhead, flop_rate;

  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Listen port (0 picks a free one)");
  serve->add_option("--store", store_spec, "mem | dir:<path>");
  serve->add_option("--executors", executors, "Number of executors");
  serve->add_option("--capacity", capacity,
                    "Device memory per executor (bytes, KiB, MiB, GiB)");
  serve->add_option("--policy", policy, "random:<seed> | rr | affinity:<q_max>");
  serve->add_option("--digest-cap", digest_cap, "Router digest size per executor");
  serve->add_option("--timing", timing_path, "Timing model JSON");
  serve->add_flag("--strict-schema", strict, "Reject unknown request fields");
  serve->add_option("--h2d-bandwidth", h2d, "Bytes per virtual second");
  serve->add_option("--d2h-bandwidth", d2h, "Bytes per virtual second");
  serve->add_option("--fetch-latency", fetch_latency, "Virtual seconds per get");
  serve->add_option("--launch-overhead", launch_overhead,
                    "Virtual seconds per launch");
  serve->add_option("--flop-rate", flop_rate, "FMAs per virtual second");

  CLI11_PARSE(app, argc, argv);

  try {
    kaas::ServerConfig config;
    config.host = host;
    config.port = port;
    config.store = store_spec;
    config.schema = strict ? kaas::SchemaMode::kStrict : kaas::SchemaMode::kLenient;
    config.fleet.executors = executors;
    config.fleet.capacity = kaas::ParseByteSize(capacity);
    config.fleet.policy = kaas::ParseRoutingPolicy(policy);
    config.fleet.digest_cap = digest_cap;
    if (!timing_path.empty()) {
      config.fleet.timing = kaas::LoadTimingModel(timing_path);
    }
    auto& t = config.fleet.timing;
    if (h2d) t.h2d_bandwidth = *h2d;
    if (d2h) t.d2h_bandwidth = *d2h;
    if (fetch_latency) t.fetch_latency = *fetch_latency;
    if (launch_overhead) t.launch_overhead = *launch_overhead;
    if (flop_rate) t.flop_rate = *flop_rate;
    config.fleet.Validate();

    // Signals are taken synchronously by a dedicated thread.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    kaas::KaasServer server(config, kaas::OpenStore(store_spec));
    const int bound = server.Bind(host, port);
    std::cerr << "kaasd listening on " << host << ":" << bound << " with "
              << executors << " executor(s), policy " << policy << "\n";

    std::thread waiter([&] {
      int sig = 0;
      sigwait(&signals, &sig);
      server.Stop();
    });
    server.Listen();
    // Listen can also end on its own; wake the waiter in that case.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  } catch (const kaas::KaasError& e) {
    std::cerr << "kaasd: " << kaas::ErrorKindName(e.kind()) << ": " << e.what()
              << "\n";
    return 2;
  }
  return 0;
}
