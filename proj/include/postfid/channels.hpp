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

// Passive linear-optical elements lifted to Fock space, circuits built from
// them, and the photon-loss channel in Kraus form.

#pragma once

#include <Eigen/Dense>

#include <string>
#include <variant>
#include <vector>

#include "postfid/fock.hpp"

namespace postfid {

/// Which input port of a beam splitter reflects with a phase of pi.
enum class GreySide { first, second };

/// Beam splitter acting on mode_a and mode_b.
///
/// Single-photon convention with t = sqrt(1 - R) and r = sqrt(R): a photon
/// entering the grey-side port is reflected with amplitude -r, one entering
/// the other port with +r, and transmitted with +t. For GreySide::first the
/// one-photon block on {|1,0>, |0,1>} is [[t, r], [-r, t]]; for
/// GreySide::second it is [[t, -r], [r, t]], the inverse of the first.
struct BeamSplitterSpec {
  std::string mode_a;
  std::string mode_b;
  double reflectivity = 0.5;
  GreySide grey_side = GreySide::first;
};

/// |n> -> exp(i * phase * n) |n> on one mode.
struct PhaseShiftSpec {
  std::string mode;
  double phase = 0.0;
};

using OpticalElement = std::variant<BeamSplitterSpec, PhaseShiftSpec>;

/// Real 2x2 single-photon block; column k is the image of a photon entering
/// port k (a = 0, b = 1). Throws std::invalid_argument unless R is in [0, 1].
Eigen::Matrix2d beam_splitter_block(double reflectivity, GreySide grey_side);

/// Unitary on a ModeSystem; the constructor checks U^dagger U = 1 within
/// tolerance().
class Unitary {
 public:
  Unitary(SystemPtr system, Matrix entries);

  const SystemPtr& system_ptr() const { return system_; }
  const ModeSystem& system() const { return *system_; }
  const Matrix& matrix() const { return entries_; }

  PureState apply(const PureState& state) const;

 private:
  SystemPtr system_;
  Matrix entries_;
};

/// Fock-space lift of a beam splitter: creation operators transform with the
/// single-photon block and the lift is assembled per occupation tuple from
/// the binomial expansion of the transformed monomials. Block-diagonal in
/// total photon number, so exact under total-photon truncation.
Unitary beam_splitter_unitary(SystemPtr system, const BeamSplitterSpec& spec);

Unitary phase_shift_unitary(SystemPtr system, const PhaseShiftSpec& spec);

Unitary element_unitary(SystemPtr system, const OpticalElement& element);

/// Ordered passive elements on a ModeSystem plus a split of the modes into
/// detected modes and output modes.
class Circuit {
 public:
  /// Throws std::invalid_argument when an element names an unknown mode, a
  /// beam splitter uses the same mode twice, or detection modes repeat.
  Circuit(SystemPtr system, std::vector<OpticalElement> elements, std::vector<std::string> detection_modes);

  const SystemPtr& system_ptr() const { return system_; }
  const ModeSystem& system() const { return *system_; }
  const std::vector<OpticalElement>& elements() const { return elements_; }
  const std::vector<std::string>& detection_modes() const { return detection_; }
  /// Complement of the detection modes, in system order.
  const std::vector<std::string>& output_modes() const { return output_; }

  /// Product of the element unitaries, last element leftmost.
  Unitary unitary() const;

 private:
  SystemPtr system_;
  std::vector<OpticalElement> elements_;
  std::vector<std::string> detection_;
  std::vector<std::string> output_;
};

/// Applies the elements in order. Throws std::invalid_argument when the
/// state lives on a different system.
PureState apply_circuit(const Circuit& circuit, const PureState& input);

/// Trace-preserving single-mode channel rho -> sum_k A_k rho A_k^dagger.
class KrausChannel {
 public:
  /// Throws std::invalid_argument unless sum_k A_k^dagger A_k = 1 within
  /// tolerance() and all operators are square with equal dimension.
  KrausChannel(std::vector<Matrix> operators, std::string label);

  const std::vector<Matrix>& operators() const { return operators_; }
  const std::string& label() const { return label_; }
  Eigen::Index dimension() const { return operators_.front().rows(); }

  /// Predictive (Schroedinger picture) action on a state.
  Matrix forward(const Matrix& rho) const;
  /// Retrodictive (Heisenberg dual) action on a measurement operator.
  Matrix backward(const Matrix& element) const;

 private:
  std::vector<Matrix> operators_;
  std::string label_;
};

/// Attenuator with transmission eta on a single mode truncated at cutoff:
/// A_k = sum_n sqrt(C(n,k) eta^(n-k) (1-eta)^k) |n-k><n|, k = 0..cutoff.
/// At eta = 1 only the identity is kept.
KrausChannel loss_kraus(double eta, int cutoff);

/// Forward evolution of a single-mode state.
HermitianOperator predict(const HermitianOperator& rho, const KrausChannel& channel);

/// Backward evolution of a single-mode POM element: sum_k A_k^dagger pi A_k.
/// Throws std::invalid_argument on a dimension mismatch or a non-positive
/// element.
HermitianOperator retro_propagate(const HermitianOperator& element, const KrausChannel& channel);

}  // namespace postfid
