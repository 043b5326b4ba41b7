// Copyright 2026 The meq-lab Authors
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

#include "meq/equilibrium.hpp"

#include <gtest/gtest.h>

#include <stdexcept>

#include "meq/ensembles.hpp"
#include "meq/states.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace meq {
namespace {

BroadcastingModel random_model(std::size_t d_s, std::vector<std::size_t> dims,
                               std::vector<DensityMatrix> initial, Engine& engine) {
  std::vector<std::vector<HermitianOperator>> hams;
  for (std::size_t d : dims) {
    std::vector<HermitianOperator> row;
    for (std::size_t i = 0; i < d_s; ++i) row.push_back(sample_gue(d, engine));
    hams.push_back(std::move(row));
  }
  return BroadcastingModel(equal_priors(d_s), std::move(hams), std::move(initial));
}

HermitianOperator diagonal(std::initializer_list<double> values) {
  RealVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double x : values) v[k++] = x;
  return HermitianOperator(v.cast<Complex>().asDiagonal().toDenseMatrix());
}

TEST(BroadcastingModel, Validation) {
  const HermitianOperator h = sample_gue(2, RngSeed{});
  EXPECT_THROW(BroadcastingModel({0.6, 0.6}, {{h, h}}, {pure_ground(2)}), std::invalid_argument);
  EXPECT_THROW(BroadcastingModel({1.2, -0.2}, {{h, h}}, {pure_ground(2)}), std::invalid_argument);
  EXPECT_THROW(BroadcastingModel({0.5, 0.5}, {{h}}, {pure_ground(2)}), std::invalid_argument);
  EXPECT_THROW(BroadcastingModel({0.5, 0.5}, {{h, h}}, {pure_ground(3)}), std::invalid_argument);
  EXPECT_THROW(BroadcastingModel({1.0}, {{h}}, {pure_ground(2)}), std::invalid_argument);
  const BroadcastingModel m({0.25, 0.75}, {{h, h}, {h, h}}, {pure_ground(2), maximally_mixed(2)});
  EXPECT_EQ(m.layout(), (std::vector<std::size_t>{2, 2, 2}));
  EXPECT_EQ(m.total_dim(), 8u);
  EXPECT_NEAR(m.system_state().matrix()(0, 1).real(), std::sqrt(0.25 * 0.75), 1e-15);
}

TEST(ConditionalStates, AlignedEigenbasisKeepsGround) {
  const BroadcastingModel m({0.5, 0.5}, {{diagonal({0, 1, 3}), diagonal({2, -1, 0.5})}},
                            {pure_ground(3)});
  const ConditionalStateSet set = conditional_equilibrium_states(m);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_LT(max_abs_entry(set.states[0][i].state().matrix() - pure_ground(3).matrix()), 1e-14);
    EXPECT_NEAR(set.overlap_sum(0, i), 1.0, 1e-14);
  }
  EXPECT_NEAR(effective_dimension_broadcast(m, set), 2.0, 1e-12);
}

TEST(ConditionalStates, MaximallyMixedIsFixed) {
  Engine engine = make_engine({13, 0});
  const BroadcastingModel m = random_model(2, {5}, {maximally_mixed(5)}, engine);
  const ConditionalStateSet set = conditional_equilibrium_states(m);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_LT(max_abs_entry(set.states[0][i].state().matrix() - maximally_mixed(5).matrix()), 1e-14);
  }
}

TEST(ConditionalStates, MatchLongTimeAverage) {
  Engine engine = make_engine({13, 1});
  const HermitianOperator h = sample_gue(4, engine);
  const DensityMatrix rho0 = testing::random_state(4, engine);
  const ConditionalState cs = conditional_state(h, rho0);
  const ComplexMatrix avg = oracle::time_average(h.matrix(), rho0.matrix(), 0.37, 200000);
  EXPECT_LT(max_abs_entry(cs.state().matrix() - avg), 1e-3);
}

TEST(ConditionalStates, DegenerateHamiltonianKeepsBlockCoherence) {
  const HermitianOperator h = diagonal({1.0, 1.0, 2.0});
  const DensityMatrix rho0 = DensityMatrix::unchecked(ComplexMatrix::Constant(3, 3, 1.0 / 3.0));
  const ConditionalState cs = conditional_state(h, rho0);
  // Eigenspace populations are 2/3 and 1/3.
  EXPECT_NEAR(cs.overlap_sum, 4.0 / 9.0 + 1.0 / 9.0, 1e-14);
  EXPECT_NEAR(std::abs(cs.state().matrix()(0, 1)), 1.0 / 3.0, 1e-14);
}

TEST(TotalHamiltonian, OutcomeIndependentCase) {
  const HermitianOperator h = sample_gue(3, RngSeed{13, 2});
  const BroadcastingModel m({0.5, 0.5}, {{h, h}}, {pure_ground(3)});
  const ComplexMatrix expect = oracle::kron(ComplexMatrix::Identity(2, 2), h.matrix());
  EXPECT_LT(max_abs_entry(assemble_total_hamiltonian(m).matrix() - expect), 1e-15);
}

TEST(TotalHamiltonian, BlockStructureAndShape) {
  Engine engine = make_engine({13, 3});
  const BroadcastingModel m = random_model(2, {2, 2}, {pure_ground(2), pure_ground(2)}, engine);
  const HermitianOperator h = assemble_total_hamiltonian(m);
  ASSERT_EQ(h.dim(), 8u);
  EXPECT_LT(hermiticity_defect(h.matrix()), 1e-15);
  for (Eigen::Index i = 0; i < 2; ++i) {
    ComplexMatrix p = ComplexMatrix::Zero(2, 2);
    p(i, i) = 1.0;
    const ComplexMatrix proj = oracle::kron(p, ComplexMatrix::Identity(4, 4));
    EXPECT_LT(max_abs_entry(h.matrix() * proj - proj * h.matrix()), 1e-10);
  }
}

TEST(TotalHamiltonian, DimensionCap) {
  Engine engine = make_engine({13, 4});
  const BroadcastingModel m = random_model(2, {16, 16}, {pure_ground(16), pure_ground(16)}, engine);
  EXPECT_THROW(assemble_total_hamiltonian(m, 256), std::length_error);
  EXPECT_NO_THROW(assemble_total_hamiltonian(m, 512));
}

TEST(Evolve, Properties) {
  Engine engine = make_engine({13, 5});
  const HermitianOperator h = sample_gue(6, engine);
  const DensityMatrix rho0 = testing::random_state(6, engine);
  EXPECT_LT(max_abs_entry(evolve(h, rho0, 0.0).matrix() - rho0.matrix()), 1e-13);

  const DensityMatrix rt = evolve(h, rho0, 2.7);
  EXPECT_NEAR(rt.trace(), 1.0, 1e-10);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> a(rho0.matrix()), b(rt.matrix());
  EXPECT_LT((a.eigenvalues() - b.eigenvalues()).cwiseAbs().maxCoeff(), 1e-10);
  const ComplexMatrix u = (Complex(0, -2.7) * h.matrix()).exp();
  EXPECT_LT(max_abs_entry(rt.matrix() - u * rho0.matrix() * u.adjoint()), 1e-10);

  const DensityMatrix stationary = pinching(rho0, eigh(h));
  EXPECT_LT(max_abs_entry(evolve(h, stationary, 11.0).matrix() - stationary.matrix()), 1e-10);
  EXPECT_THROW(evolve(h, pure_ground(3), 1.0), std::invalid_argument);
}

TEST(EquilibriumState, CommutingInputIsFixed) {
  const HermitianOperator h = diagonal({0.0, 1.0, 2.5});
  const DensityMatrix rho0 = thermal_state({1.0, 3});
  EXPECT_LT(max_abs_entry(equilibrium_state_general(h, rho0).matrix() - rho0.matrix()), 1e-15);
}

TEST(EquilibriumState, MatchesProductForm) {
  Engine engine = make_engine({13, 6});
  for (int inst = 0; inst < 10; ++inst) {
    const BroadcastingModel m =
        random_model(2, {2, 3}, {testing::random_state(2, engine), pure_ground(3)}, engine);
    const DensityMatrix global =
        equilibrium_state_general(assemble_total_hamiltonian(m), m.initial_state());
    const ConditionalStateSet set = conditional_equilibrium_states(m);
    ComplexMatrix expect = ComplexMatrix::Zero(12, 12);
    for (Eigen::Index i = 0; i < 2; ++i) {
      ComplexMatrix p = ComplexMatrix::Zero(2, 2);
      p(i, i) = m.pointer_probs()[static_cast<std::size_t>(i)];
      expect += oracle::kron(p, oracle::kron(set.states[0][i].state().matrix(),
                                             set.states[1][i].state().matrix()));
    }
    EXPECT_LT(max_abs_entry(global.matrix() - expect), 1e-10);
    EXPECT_NEAR(global.trace(), 1.0, 1e-12);
    EXPECT_TRUE(is_density_matrix(global.matrix()));
  }
}

TEST(EffectiveDimension, GeneralExamples) {
  Engine engine = make_engine({13, 7});
  const HermitianOperator h = sample_gue(6, engine);
  const SpectralDecomposition sd = eigh(h);
  const DensityMatrix eigenstate = DensityMatrix::unchecked(sd.eigenvectors.col(2) * sd.eigenvectors.col(2).adjoint());
  EXPECT_NEAR(effective_dimension_general(h, eigenstate), 1.0, 1e-12);
  EXPECT_NEAR(effective_dimension_general(h, maximally_mixed(6)), 6.0, 1e-12);
  for (int k = 0; k < 20; ++k) {
    const DensityMatrix pure = testing::random_pure_state(6, engine);
    const double d_eff = effective_dimension_general(sd, pure);
    EXPECT_NEAR(d_eff * pinching(pure, sd).purity(), 1.0, 1e-9);
  }
}

TEST(EffectiveDimension, BroadcastExamples) {
  Engine engine = make_engine({13, 8});
  const BroadcastingModel mixed =
      random_model(3, {2, 4}, {maximally_mixed(2), maximally_mixed(4)}, engine);
  EXPECT_NEAR(effective_dimension_broadcast(mixed, conditional_equilibrium_states(mixed)), 24.0, 1e-9);

  for (int inst = 0; inst < 20; ++inst) {
    const BroadcastingModel m = random_model(2, {2, 2}, {pure_ground(2), pure_ground(2)}, engine);
    const double factored = effective_dimension_broadcast(m, conditional_equilibrium_states(m));
    const double global = effective_dimension_general(assemble_total_hamiltonian(m), m.initial_state());
    EXPECT_NEAR(factored, global, 1e-9 * global);
    EXPECT_GE(factored, 1.0);
    EXPECT_LE(factored, 8.0 + 1e-9);
  }
}

TEST(EffectiveDimension, InvariantUnderSubEnvironmentOrder) {
  Engine engine = make_engine({13, 9});
  const HermitianOperator a0 = sample_gue(2, engine), a1 = sample_gue(2, engine);
  const HermitianOperator b0 = sample_gue(3, engine), b1 = sample_gue(3, engine);
  const DensityMatrix ra = testing::random_state(2, engine), rb = testing::random_state(3, engine);
  const BroadcastingModel ab({0.3, 0.7}, {{a0, a1}, {b0, b1}}, {ra, rb});
  const BroadcastingModel ba({0.3, 0.7}, {{b0, b1}, {a0, a1}}, {rb, ra});
  EXPECT_NEAR(effective_dimension_broadcast(ab, conditional_equilibrium_states(ab)),
              effective_dimension_broadcast(ba, conditional_equilibrium_states(ba)), 1e-12);
}

TEST(EquilibrationError, Values) {
  EXPECT_DOUBLE_EQ(equilibration_error(2, 4.0), 0.25);
  EXPECT_DOUBLE_EQ(equilibration_error(3, 1.0), 0.75);
  EXPECT_THROW(equilibration_error(2, 0.5), std::invalid_argument);
  // Maximally mixed sub-environments: sqrt(d_S) / (4 d_l^{N_E/2}).
  EXPECT_NEAR(equilibration_error(2, 2.0 * 16.0), std::sqrt(2.0) / (4.0 * 4.0), 1e-15);
}

TEST(ObserverGrouping, Validation) {
  EXPECT_THROW(ObserverGrouping(3, {{0, 1}}), std::invalid_argument);
  EXPECT_THROW(ObserverGrouping(2, {{0, 1}, {1}}), std::invalid_argument);
  EXPECT_THROW(ObserverGrouping(2, {{0, 1}, {}}), std::invalid_argument);
  const ObserverGrouping g(3, {{2, 0}, {1}});
  EXPECT_EQ(g.group(0), (std::vector<std::size_t>{0, 2}));
  const ObserverGrouping c = ObserverGrouping::contiguous(5, 2);
  EXPECT_EQ(c.num_observers(), 3u);
  EXPECT_EQ(c.group(2), (std::vector<std::size_t>{4}));
}

TEST(ObserverStates, TensorProductOfConditionalStates) {
  Engine engine = make_engine({13, 10});
  const BroadcastingModel m = random_model(2, {2, 2, 2}, {pure_ground(2), pure_ground(2), pure_ground(2)}, engine);
  const ConditionalStateSet set = conditional_equilibrium_states(m);
  const ObserverGrouping g(3, {{0, 2}, {1}});
  const std::vector<FactoredState> states = observer_conditional_states(set, g, 0);
  ASSERT_EQ(states.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    const ComplexMatrix expect =
        oracle::kron(set.states[0][i].state().matrix(), set.states[2][i].state().matrix());
    EXPECT_LT(max_abs_entry(states[i].density() - expect), 1e-14);
  }
}

}  // namespace
}  // namespace meq
