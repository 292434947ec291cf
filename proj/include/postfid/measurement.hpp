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

// Photon-counting measurements: ideal and loss-degraded POM sets, compound
// detection over several modes, and the retrodictive weight table that
// relates a degraded POM to the ideal one.

#pragma once

#include <Eigen/Dense>

#include <compare>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "postfid/channels.hpp"
#include "postfid/fock.hpp"

namespace postfid {

/// Photon counts reported by the detectors, one entry per detection mode.
struct OutcomeLabel {
  std::vector<int> counts;

  auto operator<=>(const OutcomeLabel&) const = default;
  bool operator==(const OutcomeLabel&) const = default;

  int total() const;
  std::string to_string() const;  // "(1,0)"
};

/// Probability that a detector with a diagonal (photon-number) response
/// reports `label` when the detected modes hold `occupation`. Defined for
/// every occupation, including ones above the set's own cutoff, which is what
/// lets compound_pom close exactly under a larger total cutoff.
using CountResponse = std::function<double(std::span<const int> label, std::span<const int> occupation)>;

/// A complete set of POM elements over a detection system.
class PomSet {
 public:
  struct Element {
    OutcomeLabel label;
    HermitianOperator op;
  };

  /// Throws std::invalid_argument if an element lives on another system,
  /// a label repeats or has the wrong arity, or the elements do not sum to the
  /// identity within tolerance(). Elements must be positive semidefinite.
  PomSet(SystemPtr system, std::vector<Element> elements, CountResponse response = {});

  const SystemPtr& system_ptr() const { return system_; }
  const ModeSystem& system() const { return *system_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<Element>& elements() const { return elements_; }
  const Element& operator[](std::size_t i) const { return elements_.at(i); }

  std::optional<std::size_t> find(const OutcomeLabel& label) const;
  /// Throws std::invalid_argument for an unknown label.
  std::size_t index_of(const OutcomeLabel& label) const;

  /// Empty for sets that are not diagonal counters.
  const CountResponse& response() const { return response_; }

  /// max |sum_k pi_k - 1|.
  double completeness_defect() const;

 private:
  SystemPtr system_;
  std::vector<Element> elements_;
  CountResponse response_;
};

/// Split of a PomSet's outcomes into the correct one and the rest, in set order.
struct Classification {
  std::size_t correct;
  std::vector<std::size_t> incorrect;
};

Classification classify(const PomSet& pom, const OutcomeLabel& correct);

/// Perfect photon counter on one mode: |n><n| for n < cutoff, and the
/// projector onto counts >= cutoff for the top outcome (which is |cutoff><cutoff|
/// inside the truncated space).
PomSet ideal_counter_pom(const std::string& mode, int cutoff);

/// Counter of quantum efficiency eta: each ideal element propagated backwards
/// through loss_kraus(eta, cutoff). Throws std::invalid_argument unless eta is
/// in [0, 1].
PomSet lossy_counter_pom(const std::string& mode, double eta, int cutoff);

/// Product detection over disjoint mode sets; labels concatenate.
///
/// When every factor carries a CountResponse the result is built from the
/// responses on a system with the given total cutoff (default: sum of the
/// factor cutoffs); labels whose total exceeds the cutoff are dropped since
/// those elements vanish identically. Otherwise the elements are tensor
/// products, every label combination is kept, and the cutoff (default: the
/// smallest factor cutoff) may not exceed any factor cutoff.
/// Throws std::invalid_argument on overlapping modes.
PomSet compound_pom(std::span<const PomSet> per_mode, std::optional<int> cutoff = std::nullopt);

/// Backward propagation of every element through a single-mode channel.
PomSet retro_propagate(const PomSet& pom, const KrausChannel& channel);

/// Retrodictive weights w(m, l) = pi^r(m | l): the weight of ideal element m in
/// the degraded element l. Equivalently the forward probability P^p(l | m)
/// that ideal outcome m turns into reported outcome l. Rows are indexed by
/// the ideal outcome m, columns by the reported outcome l; every row sums
/// to 1 because the degraded detector always reports something.
class RetroWeightTable {
 public:
  /// Throws std::invalid_argument if the shape disagrees with the labels or a
  /// row sum deviates from 1 by more than tolerance().
  RetroWeightTable(std::vector<OutcomeLabel> labels, Eigen::MatrixXd weights);

  const std::vector<OutcomeLabel>& labels() const { return labels_; }
  const Eigen::MatrixXd& matrix() const { return weights_; }
  std::size_t size() const { return labels_.size(); }

  /// pi^r(ideal | reported) == P^p(reported | ideal).
  double weight(std::size_t ideal, std::size_t reported) const { return weights_(ideal, reported); }

  static RetroWeightTable identity(std::vector<OutcomeLabel> labels);

 private:
  std::vector<OutcomeLabel> labels_;
  Eigen::MatrixXd weights_;
};

/// Expands each element of `mixed` over the elements of `ideal` (same system,
/// same labels in the same order). Throws std::invalid_argument when an
/// expansion residual exceeds 1e-8, i.e. the degraded element is not in the
/// span of the ideal ones.
RetroWeightTable retro_weights(const PomSet& mixed, const PomSet& ideal);

}  // namespace postfid
