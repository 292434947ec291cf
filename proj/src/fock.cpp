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

#include "postfid/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "postfid/config.hpp"
#include "postfid/errors.hpp"

namespace postfid {

namespace {

// Compositions of `total` into `parts` non-negative integers, first part
// descending.
void compositions(int total, int parts, Occupation& prefix, std::vector<Occupation>& out) {
  if (parts == 0) {
    if (total == 0) out.push_back(prefix);
    return;
  }
  if (parts == 1) {
    prefix.push_back(total);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int n = total; n >= 0; --n) {
    prefix.push_back(n);
    compositions(total - n, parts - 1, prefix, out);
    prefix.pop_back();
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

bool is_diagonal(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}

// For each index of `system`, the index of its restriction to `positions`
// inside `sub`, or -1 when the restricted tuple is outside sub's basis.
std::vector<long> restriction_map(const ModeSystem& system, const std::vector<std::size_t>& positions,
                                  const ModeSystem& sub) {
  std::vector<long> map(system.dimension());
  Occupation part(positions.size());
  for (std::size_t i = 0; i < system.dimension(); ++i) {
    const Occupation& occ = system.occupation(i);
    for (std::size_t k = 0; k < positions.size(); ++k) part[k] = occ[positions[k]];
    auto found = sub.find(part);
    map[i] = found ? static_cast<long>(*found) : -1;
  }
  return map;
}

std::vector<std::size_t> positions_of(const ModeSystem& system, std::span<const std::string> labels) {
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const auto& label : labels) out.push_back(system.position_of(label));
  return out;
}

}  // namespace

// ---------------------------------------------------------------- ModeSystem

ModeSystem::ModeSystem(std::vector<std::string> labels, int cutoff)
    : labels_(std::move(labels)), cutoff_(cutoff) {
  if (cutoff_ < 0) throw std::invalid_argument("ModeSystem: cutoff must be non-negative");
  std::unordered_set<std::string> seen;
  for (const auto& label : labels_) {
    if (label.empty()) throw std::invalid_argument("ModeSystem: empty mode label");
    if (!seen.insert(label).second) {
      throw std::invalid_argument("ModeSystem: duplicate mode label '" + label + "'");
    }
  }
  const int parts = mode_count();
  for (int total = 0; total <= (parts == 0 ? 0 : cutoff_); ++total) {
    Occupation prefix;
    compositions(total, parts, prefix, basis_);
  }
  for (std::size_t i = 0; i < basis_.size(); ++i) index_.emplace(basis_[i], i);
}

SystemPtr ModeSystem::make(std::vector<std::string> labels, int cutoff) {
  return std::make_shared<const ModeSystem>(std::move(labels), cutoff);
}

std::optional<std::size_t> ModeSystem::find(std::span<const int> occupation) const {
  if (occupation.size() != labels_.size()) return std::nullopt;
  auto it = index_.find(Occupation(occupation.begin(), occupation.end()));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ModeSystem::index_of(std::span<const int> occupation) const {
  auto found = find(occupation);
  if (!found) throw std::out_of_range("ModeSystem: occupation tuple outside the truncated basis");
  return *found;
}

int ModeSystem::total_photons(std::size_t index) const {
  const Occupation& occ = basis_.at(index);
  int total = 0;
  for (int n : occ) total += n;
  return total;
}

std::size_t ModeSystem::position_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw std::invalid_argument("ModeSystem: unknown mode '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

bool ModeSystem::contains(const std::string& label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

SystemPtr subsystem(const ModeSystem& parent, std::span<const std::string> keep) {
  std::vector<std::string> labels;
  for (const auto& label : parent.labels()) {
    if (std::find(keep.begin(), keep.end(), label) != keep.end()) labels.push_back(label);
  }
  if (labels.size() != keep.size()) {
    for (const auto& label : keep) parent.position_of(label);  // throws on the unknown one
    throw std::invalid_argument("subsystem: repeated mode label");
  }
  return ModeSystem::make(std::move(labels), parent.cutoff());
}

// ---------------------------------------------------------------- PureState

PureState::PureState(SystemPtr system, Vector amplitudes)
    : system_(std::move(system)), amplitudes_(std::move(amplitudes)) {
  if (!system_) throw std::invalid_argument("PureState: null system");
  if (static_cast<std::size_t>(amplitudes_.size()) != system_->dimension()) {
    throw std::invalid_argument("PureState: amplitude count does not match the basis dimension");
  }
  const double deviation = std::abs(amplitudes_.squaredNorm() - 1.0);
  if (!(deviation <= 1e-12)) {
    throw std::invalid_argument("PureState: squared norm deviates from 1 by " + format_double(deviation));
  }
}

PureState PureState::normalized(SystemPtr system, Vector amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("PureState: cannot normalise a zero vector");
  amplitudes /= norm;
  return PureState(std::move(system), std::move(amplitudes));
}

PureState PureState::normalized(const UnnormalizedState& state) {
  return normalized(state.system, state.amplitudes);
}

PureState PureState::basis_state(SystemPtr system, std::span<const int> occupation) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(system->dimension()));
  v(static_cast<Eigen::Index>(system->index_of(occupation))) = 1.0;
  return PureState(std::move(system), std::move(v));
}

Complex PureState::amplitude(std::span<const int> occupation) const {
  auto found = system_->find(occupation);
  return found ? amplitudes_(static_cast<Eigen::Index>(*found)) : Complex(0.0, 0.0);
}

HermitianOperator PureState::density() const {
  return HermitianOperator(system_, amplitudes_ * amplitudes_.adjoint(), Role::density);
}

// ---------------------------------------------------------- HermitianOperator

const char* to_string(Role role) {
  switch (role) {
    case Role::density:
      return "density";
    case Role::pom_element:
      return "pom_element";
    case Role::generic:
      return "generic";
  }
  return "unknown";
}

double max_asymmetry(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
    }
  }
  return worst;
}

double min_eigenvalue(const Matrix& hermitian) {
  if (hermitian.rows() == 0) return 0.0;
  if (is_diagonal(hermitian)) return hermitian.diagonal().real().minCoeff();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

HermitianOperator::HermitianOperator(SystemPtr system, Matrix entries, Role role)
    : system_(std::move(system)), entries_(std::move(entries)), role_(role) {
  if (!system_) throw std::invalid_argument("HermitianOperator: null system");
  const auto dim = static_cast<Eigen::Index>(system_->dimension());
  if (entries_.rows() != dim || entries_.cols() != dim) {
    throw std::invalid_argument("HermitianOperator: matrix shape does not match the basis dimension");
  }
  const double asym = max_asymmetry(entries_);
  if (asym > kHermiticityTolerance) {
    throw std::invalid_argument("HermitianOperator: not Hermitian, asymmetry " + format_double(asym));
  }
  entries_ = 0.5 * (entries_ + entries_.adjoint()).eval();

  const double tol = tolerance();
  if (role_ == Role::density) {
    const double dev = std::abs(trace() - 1.0);
    if (dev > tol) {
      throw std::invalid_argument("HermitianOperator(density): trace deviates from 1 by " + format_double(dev));
    }
  }
  if (role_ == Role::density || role_ == Role::pom_element) {
    const double lowest = min_eigenvalue(entries_);
    if (lowest < -tol) {
      throw std::invalid_argument(std::string("HermitianOperator(") + to_string(role_) +
                                  "): negative eigenvalue " + format_double(lowest));
    }
  }
}

HermitianOperator HermitianOperator::identity(SystemPtr system, Role role) {
  const auto dim = static_cast<Eigen::Index>(system->dimension());
  return HermitianOperator(std::move(system), Matrix::Identity(dim, dim), role);
}

HermitianOperator HermitianOperator::zero(SystemPtr system, Role role) {
  const auto dim = static_cast<Eigen::Index>(system->dimension());
  return HermitianOperator(std::move(system), Matrix::Zero(dim, dim), role);
}

HermitianOperator HermitianOperator::with_role(Role role) const {
  return HermitianOperator(system_, entries_, role);
}

double HermitianOperator::expectation(const PureState& psi) const {
  if (!(psi.system() == *system_)) throw std::invalid_argument("expectation: system mismatch");
  return psi.amplitudes().dot(entries_ * psi.amplitudes()).real();
}

HermitianOperator WeightedOperator::normalized() const {
  if (!(weight > kImpossibleOutcome)) {
    throw ImpossibleOutcome("impossible outcome: weight " + format_double(weight));
  }
  return HermitianOperator(op.system_ptr(), op.matrix() / weight, Role::density);
}

// ------------------------------------------------------------------ Spectrum

Spectrum hermitian_spectrum(const Matrix& m) {
  const double asym = max_asymmetry(m);
  if (asym > kHermiticityTolerance) {
    throw std::invalid_argument("hermitian_spectrum: not Hermitian, asymmetry " + format_double(asym));
  }
  const Matrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw std::runtime_error("hermitian_spectrum: eigensolver failed");
  return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

Spectrum hermitian_spectrum(const HermitianOperator& op) { return hermitian_spectrum(op.matrix()); }

// ------------------------------------------------------- tensor / embedding

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b, std::optional<int> cutoff) {
  std::vector<std::string> labels = a.system().labels();
  for (const auto& label : b.system().labels()) {
    if (a.system().contains(label)) {
      throw std::invalid_argument("tensor: mode label '" + label + "' appears in both factors");
    }
    labels.push_back(label);
  }
  const int combined_cutoff = cutoff.value_or(a.system().cutoff() + b.system().cutoff());
  auto combined = ModeSystem::make(labels, combined_cutoff);

  std::vector<std::size_t> pos_a(a.system().mode_count()), pos_b(b.system().mode_count());
  for (std::size_t k = 0; k < pos_a.size(); ++k) pos_a[k] = k;
  for (std::size_t k = 0; k < pos_b.size(); ++k) pos_b[k] = pos_a.size() + k;
  const auto map_a = restriction_map(*combined, pos_a, a.system());
  const auto map_b = restriction_map(*combined, pos_b, b.system());

  const auto dim = static_cast<Eigen::Index>(combined->dimension());
  Matrix out = Matrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (map_a[j] < 0 || map_b[j] < 0) continue;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (map_a[i] < 0 || map_b[i] < 0) continue;
      out(i, j) = a.matrix()(map_a[i], map_a[j]) * b.matrix()(map_b[i], map_b[j]);
    }
  }
  const Role role =
      (a.role() == Role::pom_element && b.role() == Role::pom_element) ? Role::pom_element : Role::generic;
  return HermitianOperator(std::move(combined), std::move(out), role);
}

Matrix embed_matrix(const Matrix& op, const ModeSystem& op_system, const ModeSystem& target) {
  if (op_system.cutoff() < target.cutoff()) {
    throw std::invalid_argument("embed: operator cutoff is below the target cutoff");
  }
  const auto inner = positions_of(target, op_system.labels());
  std::vector<std::size_t> outer;
  for (std::size_t k = 0; k < target.labels().size(); ++k) {
    if (std::find(inner.begin(), inner.end(), k) == inner.end()) outer.push_back(k);
  }
  std::vector<std::string> outer_labels;
  for (auto k : outer) outer_labels.push_back(target.labels()[k]);
  const ModeSystem rest(outer_labels, target.cutoff());

  const auto map_in = restriction_map(target, inner, op_system);
  const auto map_out = restriction_map(target, outer, rest);

  // Group target indices by the occupation of the untouched modes.
  std::vector<std::vector<Eigen::Index>> groups(rest.dimension());
  for (std::size_t i = 0; i < target.dimension(); ++i) groups[map_out[i]].push_back(static_cast<Eigen::Index>(i));

  const auto dim = static_cast<Eigen::Index>(target.dimension());
  Matrix out = Matrix::Zero(dim, dim);
  for (const auto& group : groups) {
    for (auto j : group) {
      for (auto i : group) out(i, j) = op(map_in[i], map_in[j]);
    }
  }
  return out;
}

HermitianOperator embed(const HermitianOperator& op, SystemPtr target) {
  Matrix m = embed_matrix(op.matrix(), op.system(), *target);
  const Role role = op.role() == Role::pom_element ? Role::pom_element : Role::generic;
  return HermitianOperator(std::move(target), std::move(m), role);
}

// ------------------------------------------------------------ partial trace

Matrix partial_trace_matrix(const Matrix& m, const ModeSystem& system, std::span<const std::string> traced) {
  if (traced.empty()) throw std::invalid_argument("partial_trace: no modes to trace");
  const auto traced_pos = positions_of(system, traced);
  std::vector<std::size_t> kept_pos;
  std::vector<std::string> kept_labels;
  for (std::size_t k = 0; k < system.labels().size(); ++k) {
    if (std::find(traced_pos.begin(), traced_pos.end(), k) == traced_pos.end()) {
      kept_pos.push_back(k);
      kept_labels.push_back(system.labels()[k]);
    }
  }
  std::vector<std::size_t> sorted = traced_pos;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("partial_trace: repeated mode label");
  }
  std::vector<std::string> traced_labels;
  for (auto k : sorted) traced_labels.push_back(system.labels()[k]);

  const ModeSystem kept(kept_labels, system.cutoff());
  const ModeSystem gone(traced_labels, system.cutoff());
  const auto map_kept = restriction_map(system, kept_pos, kept);
  const auto map_gone = restriction_map(system, sorted, gone);

  std::vector<std::vector<Eigen::Index>> groups(gone.dimension());
  for (std::size_t i = 0; i < system.dimension(); ++i) groups[map_gone[i]].push_back(static_cast<Eigen::Index>(i));

  const auto dim = static_cast<Eigen::Index>(kept.dimension());
  Matrix out = Matrix::Zero(dim, dim);
  for (const auto& group : groups) {
    for (auto j : group) {
      for (auto i : group) out(map_kept[i], map_kept[j]) += m(i, j);
    }
  }
  return out;
}

HermitianOperator partial_trace(const HermitianOperator& op, std::span<const std::string> traced) {
  Matrix reduced = partial_trace_matrix(op.matrix(), op.system(), traced);
  std::vector<std::string> kept;
  for (const auto& label : op.system().labels()) {
    if (std::find(traced.begin(), traced.end(), label) == traced.end()) kept.push_back(label);
  }
  auto system = ModeSystem::make(std::move(kept), op.system().cutoff());
  return HermitianOperator(std::move(system), std::move(reduced), op.role());
}

}  // namespace postfid
