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

// Fidelity measures for postselecting devices behind imperfect detectors.
//
//   F_o  overlap fidelity   <psi| rho'_c |psi>
//   F_r  retrodictive fidelity   P^retr(c | c), the probability that the
//        detected modes really held the outcome the detector announced
//   F_c  correct output fidelity   F_r + sum_j P^retr(i_j | c) P^max_j, where
//        P^max_j is the largest fraction of |psi><psi| contained in the
//        incorrect conditional state rho_{i_j}
//
// with F_r <= F_c <= F_o <= 1.

#pragma once

#include <span>
#include <vector>

#include "postfid/channels.hpp"
#include "postfid/fock.hpp"
#include "postfid/measurement.hpp"
#include "postfid/postselect.hpp"

namespace postfid {

/// <psi| actual |psi>. Throws std::invalid_argument on a system mismatch.
double overlap_fidelity(const PureState& desired, const HermitianOperator& actual);

/// Bayes-inverted probabilities P^retr(k | reported) that the detected modes
/// held ideal outcome k, given the imperfect detector reported `reported`.
struct RetroConditionals {
  std::vector<OutcomeLabel> labels;
  std::vector<double> probabilities;
  std::size_t reported = 0;
  /// sum_m p_m P^p(reported | m): probability that the imperfect detector
  /// reports this outcome.
  double click_probability = 0.0;

  double probability(const OutcomeLabel& label) const;
};

/// P^retr(k | c) = p_k P^p(c | k) / sum_m p_m P^p(c | m). Throws
/// ImpossibleOutcome when the denominator is at or below kImpossibleOutcome.
RetroConditionals bayes_retro(const OutcomeDistribution& dist, const RetroWeightTable& weights,
                              const OutcomeLabel& reported);

/// P^retr(c | c): the entry for the reported outcome itself.
double retrodictive_fidelity(const RetroConditionals& conds);

/// Largest p with rho - p |psi><psi| positive semidefinite, and the remainder.
struct Extraction {
  double p_max;
  HermitianOperator remainder;  // rho - p_max |psi><psi|, trace 1 - p_max
};

/// Closed form: 0 if psi has weight outside the support of rho (eigenvalues
/// above tolerance()), else 1 / <psi| rho^+ |psi> with rho^+ the inverse on
/// the support.
Extraction pmax_extract(const HermitianOperator& rho, const PureState& psi);

/// Retrodictive weight and extractable fraction of one incorrect outcome.
struct IncorrectTerm {
  OutcomeLabel label;
  double retro_probability = 0.0;  // P^retr(i_j | c)
  double p_max = 0.0;              // P^max_{i_j}
  double overlap = 0.0;            // <psi| rho_{i_j} |psi>
};

/// F_r + sum_j P^retr(i_j | c) P^max_j.
double correct_output_fidelity(const RetroConditionals& conds, std::span<const IncorrectTerm> incorrect);

struct FidelityReport {
  double eta = 1.0;
  double click_probability = 0.0;
  double F_r = 0.0;
  double F_c = 0.0;
  double F_o = 0.0;
  /// F_o rebuilt from the Bayes decomposition sum_k P^retr(k|c) <psi|rho_k|psi>.
  double F_o_decomposed = 0.0;
  /// Probability of the correct outcome with a perfect detector.
  double perfect_probability = 0.0;
  /// P^max of the lumped incorrect state sum_j P^retr(i_j|c) rho_{i_j} / P^retr(i|c).
  double lumped_p_max = 0.0;
  /// Outcomes with nonzero prior probability other than the correct one.
  std::vector<IncorrectTerm> incorrect;
};

/// Full pipeline for a device: joint output state, per-mode lossy counters of
/// efficiency eta on the circuit's detection modes, and all three fidelities
/// for the reported outcome `correct`. Throws std::logic_error if the chain
/// F_r <= F_c <= F_o <= 1 fails by more than 1e-12, and ImpossibleOutcome if
/// the correct outcome cannot be reported.
FidelityReport fidelity_report(const Circuit& circuit, const PureState& input, const PureState& desired,
                               const OutcomeLabel& correct, double eta);

}  // namespace postfid
