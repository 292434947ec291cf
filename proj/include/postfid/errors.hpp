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

#pragma once

#include <stdexcept>

namespace postfid {

/// Raised when a conditional quantity is requested for an outcome whose
/// probability is at or below kImpossibleOutcome.
class ImpossibleOutcome : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace postfid
