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

#include "postfid/channels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "postfid/config.hpp"

namespace postfid {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

std::string describe(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

void check_unit_interval(double value, const char* what) {
  if (!(value >= 0.0 && value <= 1.0)) {
    std::ostringstream os;
    os << what << " must lie in [0, 1], got " << value;
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

Eigen::Matrix2d beam_splitter_block(double reflectivity, GreySide grey_side) {
  check_unit_interval(reflectivity, "beam splitter reflectivity");
  const double t = std::sqrt(1.0 - reflectivity);
  const double r = std::sqrt(reflectivity);
  Eigen::Matrix2d block;
  if (grey_side == GreySide::first) {
    block << t, r, -r, t;
  } else {
    block << t, -r, r, t;
  }
  return block;
}

// ------------------------------------------------------------------ Unitary

Unitary::Unitary(SystemPtr system, Matrix entries) : system_(std::move(system)), entries_(std::move(entries)) {
  const auto dim = static_cast<Eigen::Index>(system_->dimension());
  if (entries_.rows() != dim || entries_.cols() != dim) {
    throw std::invalid_argument("Unitary: matrix shape does not match the basis dimension");
  }
  const double defect = (entries_.adjoint() * entries_ - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (!(defect <= tolerance())) throw std::invalid_argument("Unitary: U^dagger U deviates from 1 by " + describe(defect));
}

PureState Unitary::apply(const PureState& state) const {
  if (!(state.system() == *system_)) throw std::invalid_argument("Unitary::apply: state lives on another system");
  return PureState(system_, entries_ * state.amplitudes());
}

Unitary beam_splitter_unitary(SystemPtr system, const BeamSplitterSpec& spec) {
  if (spec.mode_a == spec.mode_b) throw std::invalid_argument("beam splitter: mode_a and mode_b must differ");
  const Eigen::Matrix2d s = beam_splitter_block(spec.reflectivity, spec.grey_side);
  const std::size_t pa = system->position_of(spec.mode_a);
  const std::size_t pb = system->position_of(spec.mode_b);

  const auto dim = static_cast<Eigen::Index>(system->dimension());
  Matrix u = Matrix::Zero(dim, dim);
  for (std::size_t col = 0; col < system->dimension(); ++col) {
    const Occupation& in = system->occupation(col);
    const int na = in[pa];
    const int nb = in[pb];
    const int n = na + nb;
    const double norm = 1.0 / std::sqrt(factorial(na) * factorial(nb));
    // a^dag -> s(0,0) a^dag + s(1,0) b^dag,  b^dag -> s(0,1) a^dag + s(1,1) b^dag
    std::vector<double> coeff(static_cast<std::size_t>(n) + 1, 0.0);  // indexed by photons in a
    for (int j = 0; j <= na; ++j) {
      const double left = binomial(na, j) * std::pow(s(0, 0), j) * std::pow(s(1, 0), na - j);
      if (left == 0.0) continue;
      for (int k = 0; k <= nb; ++k) {
        const double right = binomial(nb, k) * std::pow(s(0, 1), k) * std::pow(s(1, 1), nb - k);
        coeff[static_cast<std::size_t>(j + k)] += left * right;
      }
    }
    Occupation out = in;
    for (int m = 0; m <= n; ++m) {
      if (coeff[static_cast<std::size_t>(m)] == 0.0) continue;
      out[pa] = m;
      out[pb] = n - m;
      const double amp = norm * coeff[static_cast<std::size_t>(m)] * std::sqrt(factorial(m) * factorial(n - m));
      u(static_cast<Eigen::Index>(system->index_of(out)), static_cast<Eigen::Index>(col)) = amp;
    }
  }
  return Unitary(std::move(system), std::move(u));
}

Unitary phase_shift_unitary(SystemPtr system, const PhaseShiftSpec& spec) {
  const std::size_t p = system->position_of(spec.mode);
  const auto dim = static_cast<Eigen::Index>(system->dimension());
  Matrix u = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const int n = system->occupation(static_cast<std::size_t>(i))[p];
    u(i, i) = std::polar(1.0, spec.phase * n);
  }
  return Unitary(std::move(system), std::move(u));
}

Unitary element_unitary(SystemPtr system, const OpticalElement& element) {
  return std::visit(
      [&](const auto& spec) -> Unitary {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, BeamSplitterSpec>) {
          return beam_splitter_unitary(system, spec);
        } else {
          return phase_shift_unitary(system, spec);
        }
      },
      element);
}

// ------------------------------------------------------------------ Circuit

Circuit::Circuit(SystemPtr system, std::vector<OpticalElement> elements, std::vector<std::string> detection_modes)
    : system_(std::move(system)), elements_(std::move(elements)), detection_(std::move(detection_modes)) {
  if (!system_) throw std::invalid_argument("Circuit: null system");
  for (const auto& element : elements_) {
    if (const auto* bs = std::get_if<BeamSplitterSpec>(&element)) {
      system_->position_of(bs->mode_a);
      system_->position_of(bs->mode_b);
      if (bs->mode_a == bs->mode_b) throw std::invalid_argument("Circuit: beam splitter on a single mode");
      check_unit_interval(bs->reflectivity, "beam splitter reflectivity");
    } else {
      system_->position_of(std::get<PhaseShiftSpec>(element).mode);
    }
  }
  for (std::size_t i = 0; i < detection_.size(); ++i) {
    system_->position_of(detection_[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (detection_[i] == detection_[j]) {
        throw std::invalid_argument("Circuit: detection mode '" + detection_[i] + "' listed twice");
      }
    }
  }
  for (const auto& label : system_->labels()) {
    if (std::find(detection_.begin(), detection_.end(), label) == detection_.end()) output_.push_back(label);
  }
}

Unitary Circuit::unitary() const {
  const auto dim = static_cast<Eigen::Index>(system_->dimension());
  Matrix total = Matrix::Identity(dim, dim);
  for (const auto& element : elements_) total = element_unitary(system_, element).matrix() * total;
  return Unitary(system_, std::move(total));
}

PureState apply_circuit(const Circuit& circuit, const PureState& input) {
  if (!(input.system() == circuit.system())) {
    throw std::invalid_argument("apply_circuit: input state lives on another system");
  }
  Vector amplitudes = input.amplitudes();
  for (const auto& element : circuit.elements()) {
    amplitudes = element_unitary(circuit.system_ptr(), element).matrix() * amplitudes;
  }
  return PureState(circuit.system_ptr(), std::move(amplitudes));
}

// ------------------------------------------------------------- KrausChannel

KrausChannel::KrausChannel(std::vector<Matrix> operators, std::string label)
    : operators_(std::move(operators)), label_(std::move(label)) {
  if (operators_.empty()) throw std::invalid_argument("KrausChannel: no operators");
  const Eigen::Index dim = operators_.front().rows();
  Matrix sum = Matrix::Zero(dim, dim);
  for (const auto& a : operators_) {
    if (a.rows() != dim || a.cols() != dim) throw std::invalid_argument("KrausChannel: operator shape mismatch");
    sum += a.adjoint() * a;
  }
  const double defect = (sum - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (!(defect <= tolerance())) {
    throw std::invalid_argument("KrausChannel: not trace preserving, defect " + describe(defect));
  }
}

Matrix KrausChannel::forward(const Matrix& rho) const {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& a : operators_) out += a * rho * a.adjoint();
  return out;
}

Matrix KrausChannel::backward(const Matrix& element) const {
  Matrix out = Matrix::Zero(element.rows(), element.cols());
  for (const auto& a : operators_) out += a.adjoint() * element * a;
  return out;
}

KrausChannel loss_kraus(double eta, int cutoff) {
  check_unit_interval(eta, "quantum efficiency");
  if (cutoff < 0) throw std::invalid_argument("loss_kraus: cutoff must be non-negative");
  const Eigen::Index dim = cutoff + 1;
  std::ostringstream label;
  label << "loss(" << eta << ")";
  if (eta == 1.0) return KrausChannel({Matrix::Identity(dim, dim)}, label.str());

  std::vector<Matrix> ops;
  ops.reserve(static_cast<std::size_t>(dim));
  for (int k = 0; k <= cutoff; ++k) {
    Matrix a = Matrix::Zero(dim, dim);
    for (int n = k; n <= cutoff; ++n) {
      a(n - k, n) = std::sqrt(binomial(n, k) * std::pow(eta, n - k) * std::pow(1.0 - eta, k));
    }
    ops.push_back(std::move(a));
  }
  return KrausChannel(std::move(ops), label.str());
}

HermitianOperator predict(const HermitianOperator& rho, const KrausChannel& channel) {
  if (static_cast<Eigen::Index>(rho.system().dimension()) != channel.dimension()) {
    throw std::invalid_argument("predict: dimension mismatch between state and channel");
  }
  return HermitianOperator(rho.system_ptr(), channel.forward(rho.matrix()), rho.role());
}

HermitianOperator retro_propagate(const HermitianOperator& element, const KrausChannel& channel) {
  if (static_cast<Eigen::Index>(element.system().dimension()) != channel.dimension()) {
    throw std::invalid_argument("retro_propagate: dimension mismatch between element and channel");
  }
  const double lowest = min_eigenvalue(element.matrix());
  if (lowest < -tolerance()) {
    throw std::invalid_argument("retro_propagate: element is not positive semidefinite (eigenvalue " +
                                describe(lowest) + ")");
  }
  return HermitianOperator(element.system_ptr(), channel.backward(element.matrix()), Role::pom_element);
}

}  // namespace postfid
