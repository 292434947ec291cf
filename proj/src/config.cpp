// Copyright 2026 The postfid Authors
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

#include "postfid/config.hpp"

#include <atomic>
#include <stdexcept>

namespace postfid {

namespace {
std::atomic<double> g_tolerance{kDefaultTolerance};
}

double tolerance() { return g_tolerance.load(std::memory_order_relaxed); }

void set_tolerance(double value) {
  if (!(value > 0.0 && value < 1.0)) {
    throw std::invalid_argument("tolerance must lie in (0, 1)");
  }
  g_tolerance.store(value, std::memory_order_relaxed);
}

}  // namespace postfid
