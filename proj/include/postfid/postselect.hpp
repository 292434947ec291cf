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

// Joint device output, outcome statistics over a POM set, and the states left
// in the output modes after a detector announces a result.

#pragma once

#include <optional>
#include <vector>

#include "postfid/channels.hpp"
#include "postfid/fock.hpp"
#include "postfid/measurement.hpp"

namespace postfid {

/// |out><out| for out = apply_circuit(circuit, input), on all circuit modes.
HermitianOperator joint_state(const Circuit& circuit, const PureState& input);

/// Outcome probabilities p_k = Tr[rho12 (1 (x) pi_k)] together with the
/// retrodictive states Lambda_k = pi_k / Tr pi_k.
///
/// The Lambda_k are detector-basis bookkeeping, not states the device ever
/// prepares in the detected modes (those are entangled with the output).
/// They are never fed back into state evolution.
struct OutcomeDistribution {
  std::vector<OutcomeLabel> labels;
  std::vector<double> probabilities;
  /// Empty where Tr pi_k vanishes.
  std::vector<std::optional<HermitianOperator>> retrodictive_states;

  std::size_t index_of(const OutcomeLabel& label) const;
  double probability(const OutcomeLabel& label) const { return probabilities.at(index_of(label)); }

  /// Lambda_2 = sum_k p_k Lambda_k on the detection system.
  HermitianOperator lambda() const;
};

/// Throws std::invalid_argument if the POM set is incomplete or its modes are
/// not part of rho12's system.
OutcomeDistribution outcome_distribution(const HermitianOperator& rho12, const PomSet& pom);

/// Tr_det[rho12 (1 (x) pi)] on the remaining modes, paired with its trace
/// (the probability of the outcome). `element` lives on a subset of rho12's
/// modes with a cutoff at least rho12's.
WeightedOperator conditional_numerator(const HermitianOperator& rho12, const HermitianOperator& element);

/// Numerators for every element of a POM set, in set order.
std::vector<WeightedOperator> conditional_numerators(const HermitianOperator& rho12, const PomSet& pom);

struct ConditionalOutput {
  OutcomeLabel outcome;
  HermitianOperator state;  // density on the output modes
  double click_probability;
};

/// State of the output modes given that `element` fired:
/// Tr_det[rho12 (1 (x) pi)] / Tr[rho12 (1 (x) pi)]. Works for ideal and for
/// retro-propagated elements alike. Throws ImpossibleOutcome when the click
/// probability is at or below kImpossibleOutcome.
ConditionalOutput conditional_state(const HermitianOperator& rho12, const PomSet::Element& element);

/// Output state for reported outcome `reported` of an imperfect detector,
/// assembled from the perfect-detector conditionals T_k and the weights:
/// [sum_k w(k, c) T_k] / [sum_k p_k w(k, c)]. The denominator is returned as
/// click_probability. Throws ImpossibleOutcome when it vanishes.
ConditionalOutput imperfect_output(const HermitianOperator& rho12, const PomSet& ideal,
                                   const RetroWeightTable& weights, const OutcomeLabel& reported);

}  // namespace postfid
