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

namespace postfid {

/// Default positivity and completeness tolerance.
inline constexpr double kDefaultTolerance = 1e-10;

/// Entrywise tolerance for Hermiticity checks.
inline constexpr double kHermiticityTolerance = 1e-12;

/// Click probabilities at or below this are treated as impossible outcomes.
inline constexpr double kImpossibleOutcome = 1e-14;

/// The global positivity/completeness tolerance. Starts at kDefaultTolerance.
double tolerance();

/// Overrides the global tolerance. Only meant to be called once at program
/// start (the CLI reads POSTFID_TOL); throws std::invalid_argument unless
/// 0 < value < 1.
void set_tolerance(double value);

}  // namespace postfid
