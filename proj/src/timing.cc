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

#include "kaas/timing.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "json.hpp"
#include "kaas/error.h"

namespace kaas {
namespace {

constexpr long double kPicosPerSecond = 1e12L;

VirtualDuration FromSeconds(long double seconds) {
  const long double ps = std::nearbyint(seconds * kPicosPerSecond);
  if (ps >= static_cast<long double>(std::numeric_limits<std::int64_t>::max())) {
    return VirtualDuration::max();
  }
  return VirtualDuration(static_cast<std::int64_t>(ps));
}

}  // namespace

void TimingModel::Validate() const {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v <= 0) {
      throw KaasError(ErrorKind::kInvalidConfig,
                      std::string("timing ") + name + " must be > 0");
    }
  };
  check(h2d_bandwidth, "h2d_bandwidth");
  check(d2h_bandwidth, "d2h_bandwidth");
  check(fetch_latency, "fetch_latency");
  check(launch_overhead, "launch_overhead");
  check(flop_rate, "flop_rate");
}

VirtualDuration TimingModel::FetchTime(std::uint64_t bytes) const {
  return FromSeconds(fetch_latency) +
         FromSeconds(static_cast<long double>(bytes) / h2d_bandwidth);
}

VirtualDuration TimingModel::FlushTime(std::uint64_t bytes) const {
  return FromSeconds(static_cast<long double>(bytes) / d2h_bandwidth);
}

VirtualDuration TimingModel::LaunchOverhead() const {
  return FromSeconds(launch_overhead);
}

VirtualDuration TimingModel::ComputeTime(std::uint64_t fma_count) const {
  return FromSeconds(static_cast<long double>(fma_count) / flop_rate);
}

TimingModel ParseTimingModel(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw KaasError(ErrorKind::kInvalidConfig,
                    std::string("timing config: ") + e.what());
  }
  if (!j.is_object()) {
    throw KaasError(ErrorKind::kInvalidConfig, "timing config: expected object");
  }
  TimingModel t;
  for (const auto& [k, v] : j.items()) {
    double* field = nullptr;
    if (k == "h2d_bandwidth") field = &t.h2d_bandwidth;
    if (k == "d2h_bandwidth") field = &t.d2h_bandwidth;
    if (k == "fetch_latency") field = &t.fetch_latency;
    if (k == "launch_overhead") field = &t.launch_overhead;
    if (k == "flop_rate") field = &t.flop_rate;
    if (field == nullptr) {
      throw KaasError(ErrorKind::kInvalidConfig,
                      "timing config: unknown field \"" + k + "\"");
    }
    if (!v.is_number()) {
      throw KaasError(ErrorKind::kInvalidConfig,
                      "timing config: \"" + k + "\" must be a number");
    }
    *field = v.get<double>();
  }
  t.Validate();
  return t;
}

TimingModel LoadTimingModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw KaasError(ErrorKind::kInvalidConfig,
                    "cannot read timing config " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseTimingModel(ss.str());
}

}  // namespace kaas
