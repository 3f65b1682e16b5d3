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

#ifndef KAAS_VIRTUAL_TIME_H_
#define KAAS_VIRTUAL_TIME_H_

#include <chrono>
#include <cstdint>

namespace kaas {

/// Simulated time. Integer picoseconds so that sums and differences of
/// simulated costs are exact.
using VirtualDuration = std::chrono::duration<std::int64_t, std::pico>;

inline double ToSeconds(VirtualDuration d) {
  return std::chrono::duration<double>(d).count();
}

/// Monotone simulated clock. Advanced analytically by the executor's cost
/// accounting; never tied to wall-clock time.
class VirtualClock {
 public:
  VirtualDuration now() const { return now_; }

  /// Negative advances are rejected, so `now()` never decreases.
  void Advance(VirtualDuration d);

 private:
  VirtualDuration now_{0};
};

}  // namespace kaas

#endif  // KAAS_VIRTUAL_TIME_H_
