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
#include "oracle/oracle.hpp"
#include "postfid/errors.hpp"
#include "postfid/fidelity.hpp"
#include "postfid/gates.hpp"
#include "test_util.hpp"

namespace {

using namespace postfid;
using testutil::max_abs;

// One photon on a 50/50 splitter, the detector watching one output port and
// "correct" meaning no click. The incorrect conditional output (vacuum) is
// orthogonal to the desired one-photon state.
struct Splitter50 {
  GateSetup setup;
  oracle::Device device;
};

Splitter50 splitter50() {
  auto s = ModeSystem::make({"a", "d"}, 1);
  Circuit c(s, {BeamSplitterSpec{"a", "d", 0.5}}, {"d"});
  auto out = subsystem(*s, c.output_modes());
  PureState input = PureState::basis_state(s, std::array<int, 2>{1, 0});
  PureState desired = PureState::basis_state(out, std::array<int, 1>{1});
  oracle::Device d;
  d.modes = 2;
  d.splitters = {{0, 1, 0.5, true}};
  d.detected = {1};
  d.output = {0};
  d.input = {{{1, 0}, 1.0}};
  d.desired = {{{1}, 1.0}};
  d.correct = {0};
  return {GateSetup{std::move(c), std::move(input), std::move(desired), OutcomeLabel{{0}}}, d};
}

PureState qubit_plus(SystemPtr s) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(s->dimension()));
  v(static_cast<Eigen::Index>(s->index_of(std::array<int, 1>{1}))) = 1.0;
  v(static_cast<Eigen::Index>(s->index_of(std::array<int, 1>{2}))) = 1.0;
  return PureState::normalized(s, v);
}

TEST(OverlapFidelity, Basics) {
  auto s = ModeSystem::make({"m"}, 2);
  const PureState one = PureState::basis_state(s, std::array<int, 1>{1});
  EXPECT_NEAR(overlap_fidelity(one, one.density()), 1.0, 1e-15);
  EXPECT_NEAR(overlap_fidelity(one, qubit_plus(s).density()), 0.5, 1e-15);
  auto other = ModeSystem::make({"n"}, 2);
  EXPECT_THROW(overlap_fidelity(PureState::basis_state(other, std::array<int, 1>{1}), one.density()),
               std::invalid_argument);
}

TEST(OverlapFidelity, GlobalPhaseInvariant) {
  auto s = ModeSystem::make({"m"}, 2);
  const PureState plus = qubit_plus(s);
  const PureState rotated(s, plus.amplitudes() * std::polar(1.0, 0.83));
  EXPECT_NEAR(overlap_fidelity(rotated, plus.density()), 1.0, 1e-15);
}

TEST(BayesRetro, PerfectDetector) {
  OutcomeDistribution dist;
  dist.labels = {OutcomeLabel{{0}}, OutcomeLabel{{1}}};
  dist.probabilities = {0.3, 0.7};
  const RetroConditionals c = bayes_retro(dist, RetroWeightTable::identity(dist.labels), OutcomeLabel{{1}});
  EXPECT_NEAR(retrodictive_fidelity(c), 1.0, 1e-15);
  EXPECT_NEAR(c.click_probability, 0.7, 1e-15);
}

TEST(BayesRetro, HandArithmetic) {
  OutcomeDistribution dist;
  dist.labels = {OutcomeLabel{{0}}, OutcomeLabel{{1}}};
  dist.probabilities = {0.5, 0.5};
  Eigen::MatrixXd w(2, 2);
  w << 0.9, 0.1, 0.1, 0.9;
  const RetroConditionals c = bayes_retro(dist, RetroWeightTable(dist.labels, w), OutcomeLabel{{0}});
  EXPECT_NEAR(retrodictive_fidelity(c), 0.9, 1e-15);
  EXPECT_NEAR(c.probability(OutcomeLabel{{1}}), 0.1, 1e-15);
  EXPECT_THROW(c.probability(OutcomeLabel{{7}}), std::invalid_argument);
}

TEST(BayesRetro, ImpossibleOutcome) {
  OutcomeDistribution dist;
  dist.labels = {OutcomeLabel{{0}}, OutcomeLabel{{1}}};
  dist.probabilities = {1.0, 0.0};
  EXPECT_THROW(bayes_retro(dist, RetroWeightTable::identity(dist.labels), OutcomeLabel{{1}}), ImpossibleOutcome);
}

TEST(BayesRetro, NsMatchesEnumeration) {
  const GateSetup ns = build_ns(NsGateSpec{});
  const double third = 1.0 / std::sqrt(3.0);
  const oracle::Report ref = oracle::evaluate(oracle::ns_device(third, third, third), 0.7);
  const FidelityReport rep = fidelity_report(ns.circuit, ns.input, ns.desired, ns.correct, 0.7);
  EXPECT_NEAR(rep.F_r, ref.F_r, 1e-12);
  EXPECT_NEAR(rep.click_probability, ref.click_probability, 1e-12);
  ASSERT_EQ(rep.incorrect.size(), ref.incorrect.size());
  for (std::size_t j = 0; j < rep.incorrect.size(); ++j) {
    EXPECT_EQ(rep.incorrect[j].label.counts, ref.incorrect[j].label);
    EXPECT_NEAR(rep.incorrect[j].retro_probability, ref.incorrect[j].retro_probability, 1e-12);
  }
}

TEST(RetrodictiveFidelity, ZeroEfficiencyMatchesEnumeration) {
  const Splitter50 sp = splitter50();
  const oracle::Report ref = oracle::evaluate(sp.device, 0.0);
  const FidelityReport rep = fidelity_report(sp.setup.circuit, sp.setup.input, sp.setup.desired, sp.setup.correct, 0.0);
  EXPECT_NEAR(ref.F_r, 0.5, 1e-12);
  EXPECT_NEAR(rep.F_r, ref.F_r, 1e-12);
  EXPECT_NEAR(rep.click_probability, 1.0, 1e-12);
}

TEST(RetrodictiveFidelity, NsPerfectDetector) {
  const GateSetup ns = build_ns(NsGateSpec{});
  const FidelityReport rep = fidelity_report(ns.circuit, ns.input, ns.desired, ns.correct, 1.0);
  EXPECT_NEAR(rep.F_r, 1.0, 1e-12);
}

TEST(Pmax, TwoStateExample) {
  auto s = ModeSystem::make({"m"}, 2);
  const PureState one = PureState::basis_state(s, std::array<int, 1>{1});
  const PureState plus = qubit_plus(s);
  // |1> has weight outside the support of |+><+|, so no positive multiple of
  // |1><1| can be removed from it.
  EXPECT_NEAR(pmax_extract(plus.density(), one).p_max, 0.0, 1e-12);
  EXPECT_NEAR(oracle::bisect_pmax(plus.density().matrix(), one.amplitudes(), 1e-13), 0.0, 1e-9);
  EXPECT_NEAR(pmax_extract(one.density(), plus).p_max, 0.0, 1e-12);
  EXPECT_NEAR(oracle::bisect_pmax(one.density().matrix(), plus.amplitudes(), 1e-13), 0.0, 1e-9);
}

TEST(Pmax, MixtureContainingTheTarget) {
  auto s = ModeSystem::make({"m"}, 2);
  const PureState one = PureState::basis_state(s, std::array<int, 1>{1});
  const PureState two = PureState::basis_state(s, std::array<int, 1>{2});
  const HermitianOperator rho(s, 0.5 * one.density().matrix() + 0.5 * two.density().matrix(), Role::density);
  EXPECT_NEAR(pmax_extract(rho, one).p_max, 0.5, 1e-12);
}

TEST(Pmax, PureTargetFullyExtracted) {
  std::mt19937_64 rng(31);
  auto s = ModeSystem::make({"a", "b"}, 2);
  const PureState psi = testutil::random_state(s, rng);
  const Extraction e = pmax_extract(psi.density(), psi);
  EXPECT_NEAR(e.p_max, 1.0, 1e-12);
  EXPECT_LE(max_abs(e.remainder.matrix()), 1e-12);
}

TEST(Pmax, ClosedFormMatchesBisectionProperty) {
  std::mt19937_64 rng(2121);
  auto s = ModeSystem::make({"a", "b"}, 2);
  const auto dim = static_cast<Eigen::Index>(s->dimension());
  for (int trial = 0; trial < 40; ++trial) {
    // Full-rank and rank-deficient mixtures; half the targets are drawn from
    // inside the support so P^max is nonzero.
    const int rank = 1 + trial % static_cast<int>(dim);
    const Matrix rho = testutil::random_density_matrix(dim, rank, rng);
    PureState psi = testutil::random_state(s, rng);
    if (trial % 2 == 0) {
      const Spectrum sp = hermitian_spectrum(rho);
      Vector v = Vector::Zero(dim);
      for (Eigen::Index k = 0; k < dim; ++k) {
        if (sp.values(k) > 1e-8) v += testutil::random_vector(1, rng)(0) * sp.vectors.col(k);
      }
      psi = PureState::normalized(s, v);
    }
    const HermitianOperator op(s, rho, Role::density);
    const Extraction e = pmax_extract(op, psi);
    EXPECT_NEAR(e.p_max, oracle::bisect_pmax(rho, psi.amplitudes(), 1e-13), 1e-9) << "trial " << trial;
    EXPECT_GE(min_eigenvalue(e.remainder.matrix()), -1e-10);
    EXPECT_NEAR(e.remainder.trace(), 1.0 - e.p_max, 1e-10);
  }
}

TEST(CorrectOutputFidelity, Arithmetic) {
  RetroConditionals conds;
  conds.labels = {OutcomeLabel{{0}}, OutcomeLabel{{1}}};
  conds.probabilities = {0.8, 0.2};
  conds.reported = 0;
  const std::array<IncorrectTerm, 1> half{{{OutcomeLabel{{1}}, 0.2, 0.5, 0.0}}};
  EXPECT_NEAR(correct_output_fidelity(conds, half), 0.9, 1e-15);
  const std::array<IncorrectTerm, 1> none{{{OutcomeLabel{{1}}, 0.2, 0.0, 0.0}}};
  EXPECT_NEAR(correct_output_fidelity(conds, none), 0.8, 1e-15);
  conds.probabilities = {1.0, 0.0};
  EXPECT_NEAR(correct_output_fidelity(conds, {}), 1.0, 1e-15);
}

TEST(FidelityReport, NsEndpoints) {
  const GateSetup ns = build_ns(NsGateSpec{});
  const FidelityReport one = fidelity_report(ns.circuit, ns.input, ns.desired, ns.correct, 1.0);
  EXPECT_NEAR(one.F_r, 1.0, 1e-12);
  EXPECT_NEAR(one.F_c, 1.0, 1e-12);
  EXPECT_NEAR(one.F_o, 1.0, 1e-12);
  const FidelityReport mid = fidelity_report(ns.circuit, ns.input, ns.desired, ns.correct, 0.8);
  EXPECT_GT(mid.F_o - mid.F_r, 0.0);
}

TEST(FidelityReport, NsGoldenAtHalfEfficiency) {
  namespace g = golden::ns_eta_half;
  const GateSetup ns = build_ns(NsGateSpec{});
  const FidelityReport r = fidelity_report(ns.circuit, ns.input, ns.desired, ns.correct, g::kEta);
  EXPECT_NEAR(r.click_probability, g::kClickProbability, 1e-10);
  EXPECT_NEAR(r.perfect_probability, g::kPerfectProbability, 1e-10);
  EXPECT_NEAR(r.F_r, g::kFr, 1e-10);
  EXPECT_NEAR(r.F_c, g::kFc, 1e-10);
  EXPECT_NEAR(r.F_o, g::kFo, 1e-10);
  ASSERT_EQ(r.incorrect.size(), g::kIncorrect.size());
  for (std::size_t j = 0; j < r.incorrect.size(); ++j) {
    EXPECT_EQ(r.incorrect[j].label.counts[0], g::kIncorrect[j].label[0]);
    EXPECT_EQ(r.incorrect[j].label.counts[1], g::kIncorrect[j].label[1]);
    EXPECT_NEAR(r.incorrect[j].retro_probability, g::kIncorrect[j].retro_probability, 1e-10);
    EXPECT_NEAR(r.incorrect[j].p_max, g::kIncorrect[j].p_max, 1e-10);
    EXPECT_NEAR(r.incorrect[j].overlap, g::kIncorrect[j].overlap, 1e-10);
  }
}

TEST(FidelityReport, DecompositionAndChainOnGrid) {
  const GateSetup ns = build_ns(NsGateSpec{});
  for (int i = 1; i <= 20; ++i) {
    const double eta = 0.05 * i;
    const FidelityReport r = fidelity_report(ns.circuit, ns.input, ns.desired, ns.correct, eta);
    EXPECT_NEAR(r.F_o, r.F_o_decomposed, 1e-12);
    EXPECT_LE(r.F_r, r.F_c + 1e-12);
    EXPECT_LE(r.F_c, r.F_o + 1e-12);
    EXPECT_LE(r.F_o, 1.0 + 1e-12);
    EXPECT_GE(r.F_r, -1e-12);
    double retro_total = r.F_r;
    for (const auto& t : r.incorrect) retro_total += t.retro_probability;
    EXPECT_NEAR(retro_total, 1.0, 1e-10);
  }
}

TEST(FidelityReport, OrthogonalIncorrectStatesMakeMeasuresEqual) {
  const Splitter50 sp = splitter50();
  for (double eta : {0.2, 0.6, 0.95}) {
    const FidelityReport r = fidelity_report(sp.setup.circuit, sp.setup.input, sp.setup.desired, sp.setup.correct, eta);
    EXPECT_NEAR(r.F_r, r.F_c, 1e-12);
    EXPECT_NEAR(r.F_c, r.F_o, 1e-12);
    const oracle::Report ref = oracle::evaluate(sp.device, eta);
    EXPECT_NEAR(r.F_o, ref.F_o, 1e-12);
  }
}

TEST(FidelityReport, ImpossibleCorrectOutcome) {
  auto s = ModeSystem::make({"a", "d"}, 1);
  Circuit c(s, {}, {"d"});
  auto out = subsystem(*s, c.output_modes());
  EXPECT_THROW(fidelity_report(c, PureState::basis_state(s, std::array<int, 2>{1, 0}),
                               PureState::basis_state(out, std::array<int, 1>{1}), OutcomeLabel{{1}}, 0.5),
               ImpossibleOutcome);
}

}  // namespace
