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

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "goldens.hpp"
#include "postfid/errors.hpp"
#include "postfid/gates.hpp"
#include "postfid/postselect.hpp"
#include "test_util.hpp"

namespace {

using namespace postfid;
using testutil::max_abs;

struct Detection {
  PomSet ideal;
  PomSet lossy;
};

Detection detection_for(const Circuit& circuit, double eta) {
  std::vector<PomSet> ideal;
  std::vector<PomSet> lossy;
  for (const auto& m : circuit.detection_modes()) {
    ideal.push_back(ideal_counter_pom(m, circuit.system().cutoff()));
    lossy.push_back(lossy_counter_pom(m, eta, circuit.system().cutoff()));
  }
  return {compound_pom(ideal, circuit.system().cutoff()), compound_pom(lossy, circuit.system().cutoff())};
}

GateSetup equal_ns() { return build_ns(NsGateSpec{}); }

TEST(JointState, VacuumAndProducts) {
  auto s = ModeSystem::make({"a", "b"}, 2);
  const Circuit c(s, {BeamSplitterSpec{"a", "b", 0.4}}, {"b"});
  const HermitianOperator vac = joint_state(c, PureState::basis_state(s, std::array<int, 2>{0, 0}));
  EXPECT_NEAR(vac.matrix()(0, 0).real(), 1.0, 1e-15);
  EXPECT_EQ(vac.role(), Role::density);

  const Circuit empty(s, {}, {"b"});
  const HermitianOperator prod = joint_state(empty, PureState::basis_state(s, std::array<int, 2>{1, 1}));
  const auto i11 = static_cast<Eigen::Index>(s->index_of(std::array<int, 2>{1, 1}));
  EXPECT_NEAR(prod.matrix()(i11, i11).real(), 1.0, 1e-15);
}

TEST(JointState, NsOutputIsRankOne) {
  const GateSetup ns = equal_ns();
  const HermitianOperator rho = joint_state(ns.circuit, ns.input);
  EXPECT_NEAR(rho.trace(), 1.0, 1e-12);
  const Spectrum s = hermitian_spectrum(rho);
  const auto n = s.values.size();
  EXPECT_NEAR(s.values(n - 1), 1.0, 1e-10);
  for (Eigen::Index i = 0; i + 1 < n; ++i) EXPECT_NEAR(s.values(i), 0.0, 1e-10);
}

TEST(OutcomeDistribution, SimpleCases) {
  auto s = ModeSystem::make({"a", "d"}, 3);
  const Circuit c(s, {}, {"d"});
  const HermitianOperator rho = joint_state(c, PureState::basis_state(s, std::array<int, 2>{2, 0}));
  const OutcomeDistribution dist = outcome_distribution(rho, ideal_counter_pom("d", 3));
  EXPECT_NEAR(dist.probability(OutcomeLabel{{0}}), 1.0, 1e-15);
  for (int n = 1; n <= 3; ++n) EXPECT_NEAR(dist.probability(OutcomeLabel{{n}}), 0.0, 1e-15);
  // A counter truncated below the state's cutoff cannot resolve it.
  EXPECT_THROW(outcome_distribution(rho, ideal_counter_pom("d", 1)), std::invalid_argument);
}

TEST(OutcomeDistribution, IdentityOnlySet) {
  std::mt19937_64 rng(12);
  auto s = ModeSystem::make({"a", "d"}, 2);
  auto d = ModeSystem::make({"d"}, 2);
  const HermitianOperator rho(s, testutil::random_density_matrix(6, 3, rng), Role::density);
  const PomSet trivial(d, {{OutcomeLabel{{0}}, HermitianOperator::identity(d)}});
  const OutcomeDistribution dist = outcome_distribution(rho, trivial);
  EXPECT_NEAR(dist.probabilities[0], 1.0, 1e-12);
}

TEST(OutcomeDistribution, NsSuccessProbabilityGolden) {
  const GateSetup ns = equal_ns();
  const Detection det = detection_for(ns.circuit, 1.0);
  const OutcomeDistribution dist = outcome_distribution(joint_state(ns.circuit, ns.input), det.ideal);
  EXPECT_NEAR(dist.probability(ns.correct), golden::kNsSuccessProbability, 1e-12);
  double total = 0.0;
  for (double p : dist.probabilities) total += p;
  EXPECT_NEAR(total, 1.0, 1e-10);
  const HermitianOperator lambda = dist.lambda();
  EXPECT_NEAR(lambda.trace(), 1.0, 1e-10);
  for (const auto& st : dist.retrodictive_states) {
    if (st) EXPECT_NEAR(st->trace(), 1.0, 1e-12);
  }
}

TEST(OutcomeDistribution, SumsToOneProperty) {
  std::mt19937_64 rng(1313);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto s = ModeSystem::make({"a", "b", "c"}, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const HermitianOperator rho(s, testutil::random_density_matrix(20, 1 + trial % 4, rng), Role::density);
    const double eta = u01(rng);
    const std::vector<PomSet> sets{lossy_counter_pom("b", eta, 3), lossy_counter_pom("c", eta, 3)};
    const OutcomeDistribution dist = outcome_distribution(rho, compound_pom(sets, 3));
    double total = 0.0;
    for (double p : dist.probabilities) {
      EXPECT_GE(p, 0.0);
      total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(ConditionalState, ProductStateIsUncorrelated) {
  std::mt19937_64 rng(21);
  auto a = ModeSystem::make({"a"}, 2);
  auto b = ModeSystem::make({"b"}, 2);
  const Matrix ra = testutil::random_density_matrix(3, 2, rng);
  const Matrix rb = testutil::random_density_matrix(3, 2, rng);
  // The default combined cutoff (4) keeps the product exact.
  const HermitianOperator full = tensor(HermitianOperator(a, ra, Role::density), HermitianOperator(b, rb, Role::density));
  const PomSet pom = ideal_counter_pom("b", 4);
  for (std::size_t k = 0; k < 3; ++k) {
    const ConditionalOutput out = conditional_state(full, pom[k]);
    for (Eigen::Index i = 0; i < 3; ++i) {
      for (Eigen::Index j = 0; j < 3; ++j) {
        const std::array<int, 1> oi{static_cast<int>(i)};
        const std::array<int, 1> oj{static_cast<int>(j)};
        const auto ii = static_cast<Eigen::Index>(out.state.system().index_of(oi));
        const auto jj = static_cast<Eigen::Index>(out.state.system().index_of(oj));
        EXPECT_NEAR(std::abs(out.state.matrix()(ii, jj) - ra(i, j)), 0.0, 1e-12);
      }
    }
  }
}

TEST(ConditionalState, PerfectNsPerformsTheSignShift) {
  const GateSetup ns = equal_ns();
  const Detection det = detection_for(ns.circuit, 1.0);
  const ConditionalOutput out = conditional_state(joint_state(ns.circuit, ns.input), det.ideal[det.ideal.index_of(ns.correct)]);
  EXPECT_LE(max_abs(out.state.matrix() - ns.desired.density().matrix()), 1e-12);
  const Spectrum s = hermitian_spectrum(out.state);
  EXPECT_NEAR(s.values(s.values.size() - 1), 1.0, 1e-12);
}

TEST(ConditionalState, ImpossibleOutcomeReported) {
  auto s = ModeSystem::make({"a", "d"}, 2);
  const Circuit c(s, {}, {"d"});
  const HermitianOperator rho = joint_state(c, PureState::basis_state(s, std::array<int, 2>{1, 0}));
  const PomSet pom = ideal_counter_pom("d", 2);
  EXPECT_THROW(conditional_state(rho, pom[1]), ImpossibleOutcome);
}

TEST(ImperfectOutput, IdentityWeightsGivePerfectConditional) {
  const GateSetup ns = equal_ns();
  const HermitianOperator rho = joint_state(ns.circuit, ns.input);
  const Detection det = detection_for(ns.circuit, 1.0);
  const ConditionalOutput perfect = conditional_state(rho, det.ideal[det.ideal.index_of(ns.correct)]);
  std::vector<OutcomeLabel> labels;
  for (const auto& e : det.ideal.elements()) labels.push_back(e.label);
  const ConditionalOutput id = imperfect_output(rho, det.ideal, RetroWeightTable::identity(labels), ns.correct);
  EXPECT_LE(max_abs(id.state.matrix() - perfect.state.matrix()), 1e-12);
  const ConditionalOutput lossless =
      imperfect_output(rho, det.ideal, retro_weights(det.lossy, det.ideal), ns.correct);
  EXPECT_LE(max_abs(lossless.state.matrix() - perfect.state.matrix()), 1e-12);
}

TEST(ImperfectOutput, TwoPathConsistencyOnGrid) {
  const GateSetup ns = equal_ns();
  const HermitianOperator rho = joint_state(ns.circuit, ns.input);
  for (int i = 1; i <= 20; ++i) {
    const double eta = 0.05 * i;
    const Detection det = detection_for(ns.circuit, eta);
    const ConditionalOutput direct = conditional_state(rho, det.lossy[det.lossy.index_of(ns.correct)]);
    const ConditionalOutput mixed = imperfect_output(rho, det.ideal, retro_weights(det.lossy, det.ideal), ns.correct);
    EXPECT_LE(max_abs(direct.state.matrix() - mixed.state.matrix()), 1e-12) << "eta " << eta;
    EXPECT_NEAR(direct.click_probability, mixed.click_probability, 1e-12);
  }
}

TEST(ImperfectOutput, RejectsMisalignedTables) {
  const GateSetup ns = equal_ns();
  const HermitianOperator rho = joint_state(ns.circuit, ns.input);
  const Detection det = detection_for(ns.circuit, 0.5);
  EXPECT_THROW(imperfect_output(rho, det.ideal, RetroWeightTable::identity({OutcomeLabel{{0, 0}}}), ns.correct),
               std::invalid_argument);
}

TEST(ConditionalState, MixingProperty) {
  std::mt19937_64 rng(1717);
  auto s = ModeSystem::make({"a", "b", "c"}, 3);
  for (int trial = 0; trial < 15; ++trial) {
    const HermitianOperator rho(s, testutil::random_density_matrix(20, 1 + trial % 3, rng), Role::density);
    const std::vector<PomSet> sets{ideal_counter_pom("b", 3), ideal_counter_pom("c", 3)};
    const PomSet pom = compound_pom(sets, 3);
    const OutcomeDistribution dist = outcome_distribution(rho, pom);
    const std::array<std::string, 2> traced{"b", "c"};
    const Matrix marginal = partial_trace(rho, traced).matrix();
    Matrix mixture = Matrix::Zero(marginal.rows(), marginal.cols());
    for (std::size_t k = 0; k < pom.size(); ++k) {
      if (dist.probabilities[k] <= 1e-10) continue;
      const ConditionalOutput out = conditional_state(rho, pom[k]);
      EXPECT_NEAR(out.state.trace(), 1.0, 1e-10);
      EXPECT_GE(min_eigenvalue(out.state.matrix()), -1e-10);
      mixture += dist.probabilities[k] * out.state.matrix();
    }
    EXPECT_LE(max_abs(mixture - marginal), 1e-12);
  }
}

}  // namespace
