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

#include "postfid/postselect.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "postfid/config.hpp"
#include "postfid/errors.hpp"

namespace postfid {

namespace {

// Index bookkeeping for contracting a joint operator against an operator on
// some of its modes.
struct Split {
  SystemPtr kept;
  std::vector<Eigen::Index> kept_index;      // joint index -> kept-system index
  std::vector<Eigen::Index> detected_index;  // joint index -> detection-system index
};

Split split_for(const ModeSystem& joint, const ModeSystem& detection) {
  if (detection.cutoff() < joint.cutoff()) {
    throw std::invalid_argument("detection system cutoff is below the joint cutoff");
  }
  std::vector<std::size_t> det_pos;
  for (const auto& label : detection.labels()) {
    if (!joint.contains(label)) throw std::invalid_argument("detection mode '" + label + "' is not a joint mode");
    det_pos.push_back(joint.position_of(label));
  }
  std::vector<std::size_t> kept_pos;
  std::vector<std::string> kept_labels;
  for (std::size_t k = 0; k < joint.labels().size(); ++k) {
    if (std::find(det_pos.begin(), det_pos.end(), k) == det_pos.end()) {
      kept_pos.push_back(k);
      kept_labels.push_back(joint.labels()[k]);
    }
  }
  Split split{ModeSystem::make(kept_labels, joint.cutoff()), {}, {}};
  Occupation kept_occ(kept_pos.size());
  Occupation det_occ(det_pos.size());
  for (std::size_t i = 0; i < joint.dimension(); ++i) {
    const Occupation& occ = joint.occupation(i);
    for (std::size_t k = 0; k < kept_pos.size(); ++k) kept_occ[k] = occ[kept_pos[k]];
    for (std::size_t k = 0; k < det_pos.size(); ++k) det_occ[k] = occ[det_pos[k]];
    split.kept_index.push_back(static_cast<Eigen::Index>(split.kept->index_of(kept_occ)));
    split.detected_index.push_back(static_cast<Eigen::Index>(detection.index_of(det_occ)));
  }
  return split;
}

// out(r(x), r(y)) += rho(x, y) pi(t(y), t(x)); the result is Hermitian
// because pi is.
WeightedOperator contract(const HermitianOperator& rho12, const Split& split, const Matrix& element) {
  const auto dim = static_cast<Eigen::Index>(split.kept->dimension());
  Matrix out = Matrix::Zero(dim, dim);
  const Matrix& rho = rho12.matrix();
  const auto n = rho.rows();
  for (Eigen::Index y = 0; y < n; ++y) {
    const Eigen::Index ry = split.kept_index[static_cast<std::size_t>(y)];
    const Eigen::Index ty = split.detected_index[static_cast<std::size_t>(y)];
    for (Eigen::Index x = 0; x < n; ++x) {
      const Complex p = element(ty, split.detected_index[static_cast<std::size_t>(x)]);
      if (p == Complex(0.0, 0.0)) continue;
      out(split.kept_index[static_cast<std::size_t>(x)], ry) += rho(x, y) * p;
    }
  }
  HermitianOperator op(split.kept, std::move(out), Role::generic);
  const double weight = op.trace();
  return WeightedOperator{std::move(op), weight};
}

std::string describe(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

HermitianOperator joint_state(const Circuit& circuit, const PureState& input) {
  return apply_circuit(circuit, input).density();
}

std::size_t OutcomeDistribution::index_of(const OutcomeLabel& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw std::invalid_argument("OutcomeDistribution: unknown outcome " + label.to_string());
  return static_cast<std::size_t>(it - labels.begin());
}

HermitianOperator OutcomeDistribution::lambda() const {
  SystemPtr system;
  for (const auto& s : retrodictive_states) {
    if (s) system = s->system_ptr();
  }
  if (!system) throw std::logic_error("OutcomeDistribution: no retrodictive states");
  const auto dim = static_cast<Eigen::Index>(system->dimension());
  Matrix sum = Matrix::Zero(dim, dim);
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    if (retrodictive_states[k]) sum += probabilities[k] * retrodictive_states[k]->matrix();
  }
  return HermitianOperator(system, std::move(sum), Role::generic);
}

OutcomeDistribution outcome_distribution(const HermitianOperator& rho12, const PomSet& pom) {
  const double defect = pom.completeness_defect();
  if (!(defect <= tolerance())) throw std::invalid_argument("outcome_distribution: POM set incomplete by " + describe(defect));
  const Split split = split_for(rho12.system(), pom.system());
  OutcomeDistribution dist;
  for (const auto& e : pom.elements()) {
    double p = contract(rho12, split, e.op.matrix()).weight;
    if (p < 0.0 && p > -tolerance()) p = 0.0;
    dist.labels.push_back(e.label);
    dist.probabilities.push_back(p);
    const double tr = e.op.trace();
    if (tr > 0.0) {
      dist.retrodictive_states.emplace_back(HermitianOperator(e.op.system_ptr(), e.op.matrix() / tr, Role::density));
    } else {
      dist.retrodictive_states.emplace_back(std::nullopt);
    }
  }
  return dist;
}

WeightedOperator conditional_numerator(const HermitianOperator& rho12, const HermitianOperator& element) {
  return contract(rho12, split_for(rho12.system(), element.system()), element.matrix());
}

std::vector<WeightedOperator> conditional_numerators(const HermitianOperator& rho12, const PomSet& pom) {
  const Split split = split_for(rho12.system(), pom.system());
  std::vector<WeightedOperator> out;
  out.reserve(pom.size());
  for (const auto& e : pom.elements()) out.push_back(contract(rho12, split, e.op.matrix()));
  return out;
}

ConditionalOutput conditional_state(const HermitianOperator& rho12, const PomSet::Element& element) {
  const double lowest = min_eigenvalue(element.op.matrix());
  if (lowest < -tolerance()) throw std::invalid_argument("conditional_state: element is not positive semidefinite");
  WeightedOperator numerator = conditional_numerator(rho12, element.op);
  if (!(numerator.weight > kImpossibleOutcome)) {
    throw ImpossibleOutcome("impossible outcome " + element.label.to_string() + ": click probability " +
                            describe(numerator.weight));
  }
  return ConditionalOutput{element.label, numerator.normalized(), numerator.weight};
}

ConditionalOutput imperfect_output(const HermitianOperator& rho12, const PomSet& ideal,
                                   const RetroWeightTable& weights, const OutcomeLabel& reported) {
  if (weights.size() != ideal.size()) throw std::invalid_argument("imperfect_output: weight table size mismatch");
  for (std::size_t k = 0; k < ideal.size(); ++k) {
    if (!(weights.labels()[k] == ideal[k].label)) {
      throw std::invalid_argument("imperfect_output: weight table ordering differs from the POM set");
    }
  }
  const std::size_t c = ideal.index_of(reported);
  const auto numerators = conditional_numerators(rho12, ideal);

  const auto& system = numerators.front().op.system_ptr();
  const auto dim = static_cast<Eigen::Index>(system->dimension());
  Matrix sum = Matrix::Zero(dim, dim);
  double click = 0.0;
  for (std::size_t k = 0; k < ideal.size(); ++k) {
    const double w = weights.weight(k, c);
    if (w == 0.0) continue;
    sum += w * numerators[k].op.matrix();
    click += w * numerators[k].weight;
  }
  if (!(click > kImpossibleOutcome)) {
    throw ImpossibleOutcome("impossible outcome " + reported.to_string() + ": click probability " + describe(click));
  }
  return ConditionalOutput{reported, HermitianOperator(system, sum / click, Role::density), click};
}

}  // namespace postfid
