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

// Reference values produced by print_goldens (brute-force oracle only) and
// frozen here. Regenerate with build/tests/print_goldens if the oracle
// changes; never from the library.

#pragma once

#include <array>

namespace golden {

/// Perfect-detector probability of outcome (1,0) for the NS gate with
/// alpha = beta = gamma = 1/sqrt(3).
inline constexpr double kNsSuccessProbability = 0.22654091966098633;

/// NS gate, alpha = beta = gamma = 1/sqrt(3), detector efficiency 0.5.
namespace ns_eta_half {
inline constexpr double kEta = 0.5;
inline constexpr double kClickProbability = 0.21927695471733857;
inline constexpr double kPerfectProbability = 0.22654091966098633;
inline constexpr double kFr = 0.51656344815854327;
inline constexpr double kFc = 0.51656344815864352;
inline constexpr double kFo = 0.75311049789577922;

struct Incorrect {
  std::array<int, 2> label;
  double retro_probability;
  double p_max;  // bisection resolves these to below 3e-13; frozen as 0
  double overlap;
};

inline constexpr std::array<Incorrect, 8> kIncorrect{{
    {{0, 0}, 0.0, 0.0, 0.58558464987464398},
    {{0, 1}, 0.0, 0.0, 0.66084773371920269},
    {{0, 2}, 0.0, 0.0, 0.33333333333333343},
    {{1, 1}, 0.062669655000948218, 0.0, 0.64760301386068797},
    {{1, 2}, 0.0025343680251597779, 0.0, 0.33333333333333343},
    {{2, 0}, 0.2363420694708897, 0.0, 0.56903559372884926},
    {{2, 1}, 0.048948045267083497, 0.0, 0.33333333333333343},
    {{3, 0}, 0.13294241407737545, 0.0, 0.33333333333333343},
}};
}  // namespace ns_eta_half

/// CS gate on |11> against the NS gate on (|0> + |2>)/sqrt(2).
struct Composition {
  double eta;
  double F_r_cs;
  double F_r_ns;
};

inline constexpr std::array<Composition, 3> kComposition{{
    {0.3, 0.26878800968109384, 0.42369254379800281},
    {0.6, 0.49009900742536833, 0.65780730674020682},
    {0.9, 0.88372567235291988, 0.93827427774987826},
}};

}  // namespace golden
