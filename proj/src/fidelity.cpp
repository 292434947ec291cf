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

#include "postfid/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "postfid/config.hpp"
#include "postfid/errors.hpp"

namespace postfid {

namespace {

constexpr double kChainSlack = 1e-12;

std::string describe(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

double overlap_fidelity(const PureState& desired, const HermitianOperator& actual) {
  if (!(desired.system() == actual.system())) {
    throw std::invalid_argument("overlap_fidelity: desired and actual states live on different systems");
  }
  return actual.expectation(desired);
}

double RetroConditionals::probability(const OutcomeLabel& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw std::invalid_argument("RetroConditionals: unknown outcome " + label.to_string());
  return probabilities[static_cast<std::size_t>(it - labels.begin())];
}

RetroConditionals bayes_retro(const OutcomeDistribution& dist, const RetroWeightTable& weights,
                              const OutcomeLabel& reported) {
  if (dist.labels != weights.labels()) {
    throw std::invalid_argument("bayes_retro: distribution and weight table disagree on outcome labels");
  }
  RetroConditionals conds;
  conds.labels = dist.labels;
  conds.reported = dist.index_of(reported);
  conds.probabilities.resize(dist.labels.size());
  double total = 0.0;
  for (std::size_t k = 0; k < dist.labels.size(); ++k) {
    conds.probabilities[k] = dist.probabilities[k] * weights.weight(k, conds.reported);
    total += conds.probabilities[k];
  }
  if (!(total > kImpossibleOutcome)) {
    throw ImpossibleOutcome("impossible outcome " + reported.to_string() + ": click probability " + describe(total));
  }
  for (double& p : conds.probabilities) p /= total;
  conds.click_probability = total;
  return conds;
}

double retrodictive_fidelity(const RetroConditionals& conds) { return conds.probabilities.at(conds.reported); }

Extraction pmax_extract(const HermitianOperator& rho, const PureState& psi) {
  if (!(rho.system() == psi.system())) throw std::invalid_argument("pmax_extract: system mismatch");
  const Spectrum spectrum = hermitian_spectrum(rho);
  const double cut = tolerance();

  double inverse_expectation = 0.0;
  double support_weight = 0.0;
  for (Eigen::Index k = 0; k < spectrum.values.size(); ++k) {
    if (spectrum.values(k) <= cut) continue;
    const double w = std::norm(spectrum.vectors.col(k).dot(psi.amplitudes()));
    support_weight += w;
    inverse_expectation += w / spectrum.values(k);
  }
  const double outside = std::max(0.0, 1.0 - support_weight);
  double p_max = 0.0;
  if (outside <= cut && inverse_expectation > 0.0) p_max = 1.0 / inverse_expectation;

  Matrix remainder = rho.matrix() - p_max * psi.amplitudes() * psi.amplitudes().adjoint();
  return Extraction{p_max, HermitianOperator(rho.system_ptr(), std::move(remainder), Role::generic)};
}

double correct_output_fidelity(const RetroConditionals& conds, std::span<const IncorrectTerm> incorrect) {
  double f = retrodictive_fidelity(conds);
  for (const auto& term : incorrect) f += term.retro_probability * term.p_max;
  return f;
}

FidelityReport fidelity_report(const Circuit& circuit, const PureState& input, const PureState& desired,
                               const OutcomeLabel& correct, double eta) {
  const int cutoff = circuit.system().cutoff();
  std::vector<PomSet> ideal_modes;
  std::vector<PomSet> lossy_modes;
  for (const auto& mode : circuit.detection_modes()) {
    ideal_modes.push_back(ideal_counter_pom(mode, cutoff));
    lossy_modes.push_back(lossy_counter_pom(mode, eta, cutoff));
  }
  const PomSet ideal = compound_pom(ideal_modes, cutoff);
  const PomSet lossy = compound_pom(lossy_modes, cutoff);

  const HermitianOperator rho12 = joint_state(circuit, input);
  const OutcomeDistribution dist = outcome_distribution(rho12, ideal);
  const RetroWeightTable weights = retro_weights(lossy, ideal);
  const RetroConditionals conds = bayes_retro(dist, weights, correct);

  FidelityReport report;
  report.eta = eta;
  report.perfect_probability = dist.probability(correct);

  const ConditionalOutput actual = conditional_state(rho12, lossy[lossy.index_of(correct)]);
  report.click_probability = actual.click_probability;
  report.F_o = overlap_fidelity(desired, actual.state);
  report.F_r = retrodictive_fidelity(conds);

  const auto numerators = conditional_numerators(rho12, ideal);
  const auto& output_system = numerators.front().op.system_ptr();
  const auto dim = static_cast<Eigen::Index>(output_system->dimension());
  Matrix lumped = Matrix::Zero(dim, dim);
  double lumped_weight = 0.0;
  const std::size_t c = ideal.index_of(correct);
  for (std::size_t k = 0; k < ideal.size(); ++k) {
    if (!(numerators[k].weight > kImpossibleOutcome)) continue;
    const HermitianOperator state = numerators[k].normalized();
    const double overlap = overlap_fidelity(desired, state);
    report.F_o_decomposed += conds.probabilities[k] * overlap;
    if (k == c) continue;
    IncorrectTerm term;
    term.label = ideal[k].label;
    term.retro_probability = conds.probabilities[k];
    term.overlap = overlap;
    term.p_max = pmax_extract(state, desired).p_max;
    report.incorrect.push_back(std::move(term));
    lumped += conds.probabilities[k] * state.matrix();
    lumped_weight += conds.probabilities[k];
  }
  report.F_c = correct_output_fidelity(conds, report.incorrect);
  if (lumped_weight > kImpossibleOutcome) {
    report.lumped_p_max =
        pmax_extract(HermitianOperator(output_system, lumped / lumped_weight, Role::density), desired).p_max;
  }

  if (!(report.F_r >= -kChainSlack && report.F_r <= report.F_c + kChainSlack &&
        report.F_c <= report.F_o + kChainSlack && report.F_o <= 1.0 + kChainSlack)) {
    std::ostringstream os;
    os.precision(15);
    os << "fidelity chain violated at eta " << eta << ": F_r " << report.F_r << ", F_c " << report.F_c << ", F_o "
       << report.F_o;
    throw std::logic_error(os.str());
  }
  return report;
}

}  // namespace postfid
