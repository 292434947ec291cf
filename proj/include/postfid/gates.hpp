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

// Nonlinear sign-shift (NS) and control sign-shift (CS) gates.
//
// NS layout (frozen; see docs/ns_layout.md):
//
//   signal   --[BS1: R = 5 - 3*sqrt(2), grey on signal]------------------> detector, expects 0
//                 |
//   ancilla0 --[BS1]--[BS2: R = (3 - sqrt(2))/7, grey on ancilla1]-------> detector, expects 1
//                        |
//   ancilla1 ------------[BS2]-------------------------------------------> output
//
// Inputs: signal a|0> + b|1> + c|2>, ancilla1 |1>, ancilla0 |0>. When the
// ancilla0 detector reads 1 and the signal detector reads 0, the ancilla1
// output holds a|0> + b|1> - c|2> with probability (3 - sqrt(2))/7.

#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "postfid/channels.hpp"
#include "postfid/fidelity.hpp"
#include "postfid/fock.hpp"
#include "postfid/measurement.hpp"

namespace postfid {

/// Reflectivity of the splitter mixing the signal with the vacuum ancilla.
inline const double kNsSignalReflectivity = 5.0 - 3.0 * std::sqrt(2.0);
/// Reflectivity of the splitter mixing the two ancillas.
inline const double kNsAncillaReflectivity = (3.0 - std::sqrt(2.0)) / 7.0;

/// Grey-side placement of the two NS splitters. The defaults are the frozen
/// layout; flipping either one breaks the sign shift (used by validation to
/// exercise its failure path).
struct NsLayout {
  GreySide signal_splitter = GreySide::first;   // BS1 on (signal, ancilla0)
  GreySide ancilla_splitter = GreySide::first;  // BS2 on (ancilla1, ancilla0)
};

/// Mode labels of one NS gate.
struct NsModes {
  std::string signal = "signal";
  std::string ancilla1 = "ancilla1";  // carries the output
  std::string ancilla0 = "ancilla0";

  static NsModes prefixed(const std::string& prefix);
};

/// The two splitters of an NS gate acting on the given modes.
std::vector<OpticalElement> ns_elements(const NsModes& modes, const NsLayout& layout = {});

struct NsGateSpec {
  Complex alpha{1.0 / std::sqrt(3.0), 0.0};
  Complex beta{1.0 / std::sqrt(3.0), 0.0};
  Complex gamma{1.0 / std::sqrt(3.0), 0.0};
  NsLayout layout{};
};

/// Everything needed to evaluate a postselecting device.
struct GateSetup {
  Circuit circuit;
  PureState input;
  PureState desired;  // on the circuit's output modes
  OutcomeLabel correct;
};

/// Three-mode NS gate, total cutoff 3. Detection modes (ancilla0, signal) with
/// correct outcome (1, 0). Throws std::invalid_argument unless
/// |alpha|^2 + |beta|^2 + |gamma|^2 = 1 within 1e-10.
GateSetup build_ns(const NsGateSpec& spec);

/// CS input: amplitudes of |control, target> in the order 00, 01, 10, 11.
struct CsGateSpec {
  std::array<Complex, 4> amplitudes{0.0, 0.0, 0.0, 1.0};
  NsLayout layout{};

  /// Throws std::invalid_argument unless control and target are 0 or 1.
  static CsGateSpec basis(int control, int target);
};

/// Single-rail CS gate: 50/50 splitter on (control, target), an NS gate on
/// each arm, and the inverse 50/50 splitter on the two NS outputs. Six modes,
/// total cutoff 4. Detection modes (control.ancilla0, control,
/// target.ancilla0, target) with correct outcome (1, 0, 1, 0); output modes
/// (control.ancilla1, target.ancilla1). The desired state applies the truth
/// table |11> -> -|11> to the input superposition. Throws
/// std::invalid_argument for unnormalised amplitudes.
GateSetup build_cs(const CsGateSpec& spec);

/// One report per efficiency, in the order given.
std::vector<FidelityReport> ns_fidelity_sweep(const NsGateSpec& spec, std::span<const double> etas);

struct CompositionCheck {
  double eta = 1.0;
  double F_r_cs = 0.0;
  double F_r_ns = 0.0;
  double F_r_ns_squared = 0.0;
  double discrepancy = 0.0;  // |F_r_cs - F_r_ns^2|
};

/// Compares the retrodictive fidelity of the CS gate on input |11>, from the
/// full six-mode simulation, with the square of the NS retrodictive fidelity
/// for the input each arm receives (|0> and |2> with probability 1/2 each
/// after the first 50/50 splitter).
CompositionCheck cs_composition_check(double eta);

}  // namespace postfid
