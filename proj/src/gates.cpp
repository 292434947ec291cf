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

#include "postfid/gates.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace postfid {

namespace {

constexpr double kNormalizationTolerance = 1e-10;

void check_normalized(double norm_squared, const char* what) {
  if (std::abs(norm_squared - 1.0) > kNormalizationTolerance) {
    std::ostringstream os;
    os << what << ": amplitudes are not normalised (squared norm " << norm_squared << ")";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

NsModes NsModes::prefixed(const std::string& prefix) {
  return NsModes{prefix, prefix + ".ancilla1", prefix + ".ancilla0"};
}

std::vector<OpticalElement> ns_elements(const NsModes& modes, const NsLayout& layout) {
  return {
      BeamSplitterSpec{modes.signal, modes.ancilla0, kNsSignalReflectivity, layout.signal_splitter},
      BeamSplitterSpec{modes.ancilla1, modes.ancilla0, kNsAncillaReflectivity, layout.ancilla_splitter},
  };
}

GateSetup build_ns(const NsGateSpec& spec) {
  check_normalized(std::norm(spec.alpha) + std::norm(spec.beta) + std::norm(spec.gamma), "build_ns");
  const NsModes modes;
  auto system = ModeSystem::make({modes.signal, modes.ancilla1, modes.ancilla0}, 3);
  Circuit circuit(system, ns_elements(modes, spec.layout), {modes.ancilla0, modes.signal});

  Vector in = Vector::Zero(static_cast<Eigen::Index>(system->dimension()));
  const std::array<Complex, 3> amps{spec.alpha, spec.beta, spec.gamma};
  for (int n = 0; n < 3; ++n) {
    const std::array<int, 3> occ{n, 1, 0};
    in(static_cast<Eigen::Index>(system->index_of(occ))) = amps[static_cast<std::size_t>(n)];
  }
  PureState input = PureState::normalized(system, std::move(in));

  auto output = subsystem(*system, circuit.output_modes());
  Vector out = Vector::Zero(static_cast<Eigen::Index>(output->dimension()));
  out(static_cast<Eigen::Index>(output->index_of(std::array<int, 1>{0}))) = spec.alpha;
  out(static_cast<Eigen::Index>(output->index_of(std::array<int, 1>{1}))) = spec.beta;
  out(static_cast<Eigen::Index>(output->index_of(std::array<int, 1>{2}))) = -spec.gamma;
  PureState desired = PureState::normalized(output, std::move(out));

  return GateSetup{std::move(circuit), std::move(input), std::move(desired), OutcomeLabel{{1, 0}}};
}

CsGateSpec CsGateSpec::basis(int control, int target) {
  if ((control != 0 && control != 1) || (target != 0 && target != 1)) {
    throw std::invalid_argument("CsGateSpec: control and target photon numbers must be 0 or 1");
  }
  CsGateSpec spec;
  spec.amplitudes = {0.0, 0.0, 0.0, 0.0};
  spec.amplitudes[static_cast<std::size_t>(2 * control + target)] = 1.0;
  return spec;
}

GateSetup build_cs(const CsGateSpec& spec) {
  double norm = 0.0;
  for (const auto& a : spec.amplitudes) norm += std::norm(a);
  check_normalized(norm, "build_cs");

  const NsModes control = NsModes::prefixed("control");
  const NsModes target = NsModes::prefixed("target");
  auto system = ModeSystem::make(
      {control.signal, target.signal, control.ancilla1, control.ancilla0, target.ancilla1, target.ancilla0}, 4);

  std::vector<OpticalElement> elements;
  elements.push_back(BeamSplitterSpec{control.signal, target.signal, 0.5, GreySide::first});
  for (const auto& e : ns_elements(control, spec.layout)) elements.push_back(e);
  for (const auto& e : ns_elements(target, spec.layout)) elements.push_back(e);
  elements.push_back(BeamSplitterSpec{control.ancilla1, target.ancilla1, 0.5, GreySide::second});

  Circuit circuit(system, std::move(elements), {control.ancilla0, control.signal, target.ancilla0, target.signal});

  auto output = subsystem(*system, circuit.output_modes());
  Vector in = Vector::Zero(static_cast<Eigen::Index>(system->dimension()));
  Vector out = Vector::Zero(static_cast<Eigen::Index>(output->dimension()));
  for (int c = 0; c <= 1; ++c) {
    for (int t = 0; t <= 1; ++t) {
      const Complex a = spec.amplitudes[static_cast<std::size_t>(2 * c + t)];
      const std::array<int, 6> joint{c, t, 1, 0, 1, 0};
      in(static_cast<Eigen::Index>(system->index_of(joint))) = a;
      const std::array<int, 2> ct{c, t};
      out(static_cast<Eigen::Index>(output->index_of(ct))) = (c == 1 && t == 1) ? -a : a;
    }
  }
  return GateSetup{std::move(circuit), PureState::normalized(system, std::move(in)),
                   PureState::normalized(output, std::move(out)), OutcomeLabel{{1, 0, 1, 0}}};
}

std::vector<FidelityReport> ns_fidelity_sweep(const NsGateSpec& spec, std::span<const double> etas) {
  const GateSetup ns = build_ns(spec);
  std::vector<FidelityReport> reports;
  reports.reserve(etas.size());
  for (double eta : etas) reports.push_back(fidelity_report(ns.circuit, ns.input, ns.desired, ns.correct, eta));
  return reports;
}

CompositionCheck cs_composition_check(double eta) {
  const GateSetup cs = build_cs(CsGateSpec::basis(1, 1));
  const FidelityReport cs_report = fidelity_report(cs.circuit, cs.input, cs.desired, cs.correct, eta);

  NsGateSpec arm;
  arm.alpha = 1.0 / std::sqrt(2.0);
  arm.beta = 0.0;
  arm.gamma = 1.0 / std::sqrt(2.0);
  const GateSetup ns = build_ns(arm);
  const FidelityReport ns_report = fidelity_report(ns.circuit, ns.input, ns.desired, ns.correct, eta);

  CompositionCheck check;
  check.eta = eta;
  check.F_r_cs = cs_report.F_r;
  check.F_r_ns = ns_report.F_r;
  check.F_r_ns_squared = ns_report.F_r * ns_report.F_r;
  check.discrepancy = std::abs(check.F_r_cs - check.F_r_ns_squared);
  return check;
}

}  // namespace postfid
