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

#include "postfid/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "postfid/config.hpp"

namespace postfid {

namespace {

constexpr double kExpansionResidual = 1e-8;

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Re Tr[a b] for Hermitian a, b.
double trace_product(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b.conjugate()).sum().real(); }

void check_efficiency(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    std::ostringstream os;
    os << "quantum efficiency must lie in [0, 1], got " << eta;
    throw std::invalid_argument(os.str());
  }
}

CountResponse ideal_response(int cutoff) {
  return [cutoff](std::span<const int> label, std::span<const int> occupation) -> double {
    const int l = label[0];
    const int m = occupation[0];
    if (l < cutoff) return m == l ? 1.0 : 0.0;
    return m >= cutoff ? 1.0 : 0.0;
  };
}

CountResponse lossy_response(double eta, int cutoff) {
  return [eta, cutoff](std::span<const int> label, std::span<const int> occupation) -> double {
    const int l = label[0];
    const int m = occupation[0];
    auto exact = [&](int count) {
      if (count > m) return 0.0;
      return binomial(m, count) * std::pow(eta, count) * std::pow(1.0 - eta, m - count);
    };
    if (l < cutoff) return exact(l);
    double tail = 0.0;
    for (int count = cutoff; count <= m; ++count) tail += exact(count);
    return tail;
  };
}

void cartesian(std::span<const PomSet> sets, std::size_t depth, std::vector<std::size_t>& pick,
               std::vector<std::vector<std::size_t>>& out) {
  if (depth == sets.size()) {
    out.push_back(pick);
    return;
  }
  for (std::size_t i = 0; i < sets[depth].size(); ++i) {
    pick.push_back(i);
    cartesian(sets, depth + 1, pick, out);
    pick.pop_back();
  }
}

}  // namespace

// -------------------------------------------------------------- OutcomeLabel

int OutcomeLabel::total() const {
  int t = 0;
  for (int c : counts) t += c;
  return t;
}

std::string OutcomeLabel::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(counts[i]);
  }
  return s + ")";
}

// -------------------------------------------------------------------- PomSet

PomSet::PomSet(SystemPtr system, std::vector<Element> elements, CountResponse response)
    : system_(std::move(system)), elements_(std::move(elements)), response_(std::move(response)) {
  if (elements_.empty()) throw std::invalid_argument("PomSet: no elements");
  std::set<OutcomeLabel> seen;
  for (const auto& e : elements_) {
    if (!(e.op.system() == *system_)) throw std::invalid_argument("PomSet: element on another system");
    if (static_cast<int>(e.label.counts.size()) != system_->mode_count()) {
      throw std::invalid_argument("PomSet: label " + e.label.to_string() + " has the wrong arity");
    }
    if (e.op.role() != Role::pom_element) throw std::invalid_argument("PomSet: element is not tagged pom_element");
    if (!seen.insert(e.label).second) throw std::invalid_argument("PomSet: duplicate label " + e.label.to_string());
  }
  const double defect = completeness_defect();
  if (!(defect <= tolerance())) {
    std::ostringstream os;
    os << "PomSet: elements do not sum to the identity (defect " << defect << ")";
    throw std::invalid_argument(os.str());
  }
}

std::optional<std::size_t> PomSet::find(const OutcomeLabel& label) const {
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (elements_[i].label == label) return i;
  }
  return std::nullopt;
}

std::size_t PomSet::index_of(const OutcomeLabel& label) const {
  auto found = find(label);
  if (!found) throw std::invalid_argument("PomSet: unknown outcome " + label.to_string());
  return *found;
}

double PomSet::completeness_defect() const {
  const auto dim = static_cast<Eigen::Index>(system_->dimension());
  Matrix sum = -Matrix::Identity(dim, dim);
  for (const auto& e : elements_) sum += e.op.matrix();
  return sum.cwiseAbs().maxCoeff();
}

Classification classify(const PomSet& pom, const OutcomeLabel& correct) {
  Classification c{pom.index_of(correct), {}};
  for (std::size_t i = 0; i < pom.size(); ++i) {
    if (i != c.correct) c.incorrect.push_back(i);
  }
  return c;
}

// ------------------------------------------------------------- constructors

PomSet ideal_counter_pom(const std::string& mode, int cutoff) {
  if (cutoff < 0) throw std::invalid_argument("ideal_counter_pom: cutoff must be non-negative");
  auto system = ModeSystem::make({mode}, cutoff);
  const auto dim = static_cast<Eigen::Index>(system->dimension());
  std::vector<PomSet::Element> elements;
  for (int n = 0; n <= cutoff; ++n) {
    Matrix p = Matrix::Zero(dim, dim);
    p(n, n) = 1.0;
    elements.push_back({OutcomeLabel{{n}}, HermitianOperator(system, std::move(p), Role::pom_element)});
  }
  return PomSet(system, std::move(elements), ideal_response(cutoff));
}

PomSet lossy_counter_pom(const std::string& mode, double eta, int cutoff) {
  check_efficiency(eta);
  const PomSet ideal = ideal_counter_pom(mode, cutoff);
  const KrausChannel loss = loss_kraus(eta, cutoff);
  std::vector<PomSet::Element> elements;
  for (const auto& e : ideal.elements()) elements.push_back({e.label, postfid::retro_propagate(e.op, loss)});
  return PomSet(ideal.system_ptr(), std::move(elements), lossy_response(eta, cutoff));
}

PomSet retro_propagate(const PomSet& pom, const KrausChannel& channel) {
  std::vector<PomSet::Element> elements;
  for (const auto& e : pom.elements()) elements.push_back({e.label, postfid::retro_propagate(e.op, channel)});
  return PomSet(pom.system_ptr(), std::move(elements));
}

PomSet compound_pom(std::span<const PomSet> per_mode, std::optional<int> cutoff) {
  if (per_mode.empty()) throw std::invalid_argument("compound_pom: no factors");
  std::vector<std::string> labels;
  bool all_responsive = true;
  int sum_cutoff = 0;
  int min_cutoff = per_mode.front().system().cutoff();
  for (const auto& set : per_mode) {
    for (const auto& label : set.system().labels()) {
      if (std::find(labels.begin(), labels.end(), label) != labels.end()) {
        throw std::invalid_argument("compound_pom: mode '" + label + "' appears in more than one factor");
      }
      labels.push_back(label);
    }
    all_responsive = all_responsive && static_cast<bool>(set.response());
    sum_cutoff += set.system().cutoff();
    min_cutoff = std::min(min_cutoff, set.system().cutoff());
  }

  std::vector<std::vector<std::size_t>> picks;
  std::vector<std::size_t> pick;
  cartesian(per_mode, 0, pick, picks);

  auto join = [&](const std::vector<std::size_t>& choice) {
    OutcomeLabel label;
    for (std::size_t s = 0; s < per_mode.size(); ++s) {
      const auto& counts = per_mode[s][choice[s]].label.counts;
      label.counts.insert(label.counts.end(), counts.begin(), counts.end());
    }
    return label;
  };

  if (!all_responsive) {
    const int combined_cutoff = cutoff.value_or(min_cutoff);
    if (combined_cutoff > min_cutoff) {
      throw std::invalid_argument("compound_pom: cutoff exceeds a factor cutoff and a factor has no count response");
    }
    std::vector<PomSet::Element> elements;
    SystemPtr system;
    for (const auto& choice : picks) {
      HermitianOperator op = per_mode[0][choice[0]].op;
      for (std::size_t s = 1; s < per_mode.size(); ++s) op = tensor(op, per_mode[s][choice[s]].op, combined_cutoff);
      if (per_mode.size() == 1) op = embed(op, ModeSystem::make(labels, combined_cutoff));
      if (!system) system = op.system_ptr();
      elements.push_back({join(choice), HermitianOperator(system, op.matrix(), Role::pom_element)});
    }
    return PomSet(system, std::move(elements));
  }

  const int combined_cutoff = cutoff.value_or(sum_cutoff);
  auto system = ModeSystem::make(labels, combined_cutoff);

  std::vector<std::size_t> arity;
  std::vector<CountResponse> responses;
  for (const auto& set : per_mode) {
    arity.push_back(static_cast<std::size_t>(set.system().mode_count()));
    responses.push_back(set.response());
  }
  CountResponse combined = [arity, responses](std::span<const int> label, std::span<const int> occupation) {
    double p = 1.0;
    std::size_t offset = 0;
    for (std::size_t s = 0; s < arity.size() && p != 0.0; ++s) {
      p *= responses[s](label.subspan(offset, arity[s]), occupation.subspan(offset, arity[s]));
      offset += arity[s];
    }
    return p;
  };

  const auto dim = static_cast<Eigen::Index>(system->dimension());
  std::vector<PomSet::Element> elements;
  for (const auto& choice : picks) {
    OutcomeLabel label = join(choice);
    if (label.total() > combined_cutoff) continue;
    Matrix diag = Matrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      diag(i, i) = combined(label.counts, system->occupation(static_cast<std::size_t>(i)));
    }
    elements.push_back({std::move(label), HermitianOperator(system, std::move(diag), Role::pom_element)});
  }
  return PomSet(system, std::move(elements), std::move(combined));
}

// ---------------------------------------------------------- retro weights

RetroWeightTable::RetroWeightTable(std::vector<OutcomeLabel> labels, Eigen::MatrixXd weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
  const auto n = static_cast<Eigen::Index>(labels_.size());
  if (weights_.rows() != n || weights_.cols() != n) {
    throw std::invalid_argument("RetroWeightTable: shape does not match the label count");
  }
  for (Eigen::Index m = 0; m < n; ++m) {
    const double defect = std::abs(weights_.row(m).sum() - 1.0);
    if (!(defect <= tolerance())) {
      std::ostringstream os;
      os << "RetroWeightTable: weights for ideal outcome " << labels_[static_cast<std::size_t>(m)].to_string()
         << " sum to " << weights_.row(m).sum() << " instead of 1";
      throw std::invalid_argument(os.str());
    }
  }
}

RetroWeightTable RetroWeightTable::identity(std::vector<OutcomeLabel> labels) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  return RetroWeightTable(std::move(labels), Eigen::MatrixXd::Identity(n, n));
}

RetroWeightTable retro_weights(const PomSet& mixed, const PomSet& ideal) {
  if (!(mixed.system() == ideal.system())) throw std::invalid_argument("retro_weights: POM sets on different systems");
  if (mixed.size() != ideal.size()) throw std::invalid_argument("retro_weights: POM sets differ in size");
  std::vector<OutcomeLabel> labels;
  for (std::size_t i = 0; i < ideal.size(); ++i) {
    if (!(mixed[i].label == ideal[i].label)) throw std::invalid_argument("retro_weights: label order differs");
    labels.push_back(ideal[i].label);
  }

  const auto n = static_cast<Eigen::Index>(ideal.size());
  Eigen::MatrixXd gram(n, n);
  Eigen::MatrixXd rhs(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const Matrix& pm = ideal[static_cast<std::size_t>(m)].op.matrix();
    if (pm.cwiseAbs().maxCoeff() == 0.0) {
      throw std::invalid_argument("retro_weights: ideal element " + labels[static_cast<std::size_t>(m)].to_string() +
                                  " vanishes");
    }
    for (Eigen::Index k = 0; k <= m; ++k) {
      gram(m, k) = gram(k, m) = trace_product(pm, ideal[static_cast<std::size_t>(k)].op.matrix());
    }
    for (Eigen::Index l = 0; l < n; ++l) rhs(m, l) = trace_product(pm, mixed[static_cast<std::size_t>(l)].op.matrix());
  }
  const Eigen::MatrixXd weights = gram.ldlt().solve(rhs);

  for (Eigen::Index l = 0; l < n; ++l) {
    Matrix residual = mixed[static_cast<std::size_t>(l)].op.matrix();
    for (Eigen::Index m = 0; m < n; ++m) residual -= weights(m, l) * ideal[static_cast<std::size_t>(m)].op.matrix();
    const double worst = residual.cwiseAbs().maxCoeff();
    if (!(worst <= kExpansionResidual)) {
      std::ostringstream os;
      os << "retro_weights: element " << labels[static_cast<std::size_t>(l)].to_string()
         << " is outside the span of the ideal elements (residual " << worst << ")";
      throw std::invalid_argument(os.str());
    }
  }
  return RetroWeightTable(std::move(labels), weights);
}

}  // namespace postfid
