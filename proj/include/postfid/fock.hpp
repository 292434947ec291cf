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

// Truncated multimode Fock space: basis indexing, pure states, Hermitian
// operators with role-specific invariants, tensor products, partial traces
// and Hermitian spectra.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace postfid {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Occupation = std::vector<int>;

class ModeSystem;
using SystemPtr = std::shared_ptr<const ModeSystem>;

/// Bosonic Fock space over labelled modes, truncated by total photon number.
///
/// The basis holds every occupation tuple (n_1, ..., n_M) with
/// n_1 + ... + n_M <= cutoff. Tuples are ordered by total photon number and,
/// inside one photon-number sector, lexicographically with the first mode
/// most significant and descending. The vacuum is therefore index 0 and each
/// sector is a contiguous block. A system with zero modes has the single
/// basis element () and represents scalars.
class ModeSystem {
 public:
  ModeSystem(std::vector<std::string> labels, int cutoff);

  static SystemPtr make(std::vector<std::string> labels, int cutoff);

  int mode_count() const { return static_cast<int>(labels_.size()); }
  int cutoff() const { return cutoff_; }
  std::size_t dimension() const { return basis_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

  const Occupation& occupation(std::size_t index) const { return basis_.at(index); }

  /// Throws std::out_of_range when the tuple is not a basis element.
  std::size_t index_of(std::span<const int> occupation) const;
  std::optional<std::size_t> find(std::span<const int> occupation) const;

  int total_photons(std::size_t index) const;

  /// Position of a mode label; throws std::invalid_argument if absent.
  std::size_t position_of(const std::string& label) const;
  bool contains(const std::string& label) const;

  bool operator==(const ModeSystem& other) const {
    return cutoff_ == other.cutoff_ && labels_ == other.labels_;
  }

 private:
  std::vector<std::string> labels_;
  int cutoff_;
  std::vector<Occupation> basis_;
  std::map<Occupation, std::size_t> index_;
};

/// A system on the given subset of modes, same cutoff, labels in the order of
/// the parent system.
SystemPtr subsystem(const ModeSystem& parent, std::span<const std::string> keep);

/// Amplitude vector that has not been normalised, e.g. a postselected branch.
struct UnnormalizedState {
  SystemPtr system;
  Vector amplitudes;

  double norm_squared() const { return amplitudes.squaredNorm(); }
};

class HermitianOperator;

/// A normalised pure state. The constructor rejects vectors whose squared
/// norm differs from 1 by more than 1e-12; use normalized() to rescale.
class PureState {
 public:
  PureState(SystemPtr system, Vector amplitudes);

  static PureState normalized(SystemPtr system, Vector amplitudes);
  static PureState normalized(const UnnormalizedState& state);
  static PureState basis_state(SystemPtr system, std::span<const int> occupation);

  const SystemPtr& system_ptr() const { return system_; }
  const ModeSystem& system() const { return *system_; }
  const Vector& amplitudes() const { return amplitudes_; }
  Complex amplitude(std::span<const int> occupation) const;

  HermitianOperator density() const;

 private:
  SystemPtr system_;
  Vector amplitudes_;
};

enum class Role { density, pom_element, generic };

const char* to_string(Role role);

/// Hermitian operator on a ModeSystem, tagged with the role it plays.
///
/// Every role requires Hermiticity within kHermiticityTolerance (the stored
/// matrix is the symmetrised input). Role::density additionally requires unit
/// trace and a minimum eigenvalue >= -tolerance(); Role::pom_element requires
/// the eigenvalue bound only.
class HermitianOperator {
 public:
  HermitianOperator(SystemPtr system, Matrix entries, Role role = Role::generic);

  static HermitianOperator identity(SystemPtr system, Role role = Role::pom_element);
  static HermitianOperator zero(SystemPtr system, Role role = Role::generic);

  const SystemPtr& system_ptr() const { return system_; }
  const ModeSystem& system() const { return *system_; }
  const Matrix& matrix() const { return entries_; }
  Role role() const { return role_; }

  double trace() const { return entries_.trace().real(); }

  /// Re-validates the entries against another role.
  HermitianOperator with_role(Role role) const;

  /// <psi|A|psi>.
  double expectation(const PureState& psi) const;

 private:
  SystemPtr system_;
  Matrix entries_;
  Role role_;
};

/// An operator paired with its trace weight. Used for conditional states
/// before division by the click probability, so numerator and denominator
/// stay separately inspectable.
struct WeightedOperator {
  HermitianOperator op;
  double weight;

  /// op / weight as a density; throws ImpossibleOutcome when weight is at or
  /// below kImpossibleOutcome.
  HermitianOperator normalized() const;
};

/// Largest |m(i,j) - conj(m(j,i))|.
double max_asymmetry(const Matrix& m);

struct Spectrum {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // columns, orthonormal
};

/// Eigen-decomposition of a Hermitian matrix. Throws std::invalid_argument,
/// quoting the measured asymmetry, if the input is not Hermitian within
/// kHermiticityTolerance.
Spectrum hermitian_spectrum(const Matrix& m);
Spectrum hermitian_spectrum(const HermitianOperator& op);

double min_eigenvalue(const Matrix& hermitian);

/// Kronecker product restricted to the combined truncated basis. The combined
/// system has labels a ++ b and the given cutoff (default: sum of the two
/// cutoffs). Combined occupations that fall outside either factor's basis get
/// zero entries. pom_element x pom_element keeps its role; anything else is
/// generic. Throws std::invalid_argument on a mode-label collision.
HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b,
                         std::optional<int> cutoff = std::nullopt);

/// 1 (x) op on a target system that contains op's modes. op's cutoff must be
/// at least the target cutoff so every target occupation is covered.
HermitianOperator embed(const HermitianOperator& op, SystemPtr target);
Matrix embed_matrix(const Matrix& op, const ModeSystem& op_system, const ModeSystem& target);

/// Traces out the named modes. The remaining system keeps the input cutoff.
/// Tracing every mode yields a one-dimensional operator holding the trace.
HermitianOperator partial_trace(const HermitianOperator& op, std::span<const std::string> traced);

/// Same contraction on an arbitrary (not necessarily Hermitian) matrix.
Matrix partial_trace_matrix(const Matrix& m, const ModeSystem& system,
                            std::span<const std::string> traced);

}  // namespace postfid
