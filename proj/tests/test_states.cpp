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

#include "meq/states.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <stdexcept>

#include "meq/ensembles.hpp"

namespace meq {
namespace {

TEST(PureGround, Values) {
  const DensityMatrix g2 = pure_ground(2);
  EXPECT_EQ(g2.matrix()(0, 0), Complex(1.0));
  EXPECT_EQ(g2.matrix()(1, 1), Complex(0.0));
  EXPECT_DOUBLE_EQ(g2.trace(), 1.0);
  EXPECT_DOUBLE_EQ(g2.purity(), 1.0);
  const DensityMatrix g4 = pure_ground(4);
  EXPECT_LT(max_abs_entry(g4.matrix() * g4.matrix() - g4.matrix()), 1e-15);
  EXPECT_EQ(g4.matrix()(0, 0), Complex(1.0));
}

TEST(MaximallyMixed, Values) {
  const DensityMatrix m = maximally_mixed(2);
  EXPECT_DOUBLE_EQ(m.matrix()(0, 0).real(), 0.5);
  EXPECT_DOUBLE_EQ(m.matrix()(1, 1).real(), 0.5);
  for (std::size_t d : {2, 3, 8}) EXPECT_NEAR(maximally_mixed(d).purity(), 1.0 / d, 1e-15);
  const ComplexMatrix u = sample_haar_unitary(3, RngSeed{1, 1});
  EXPECT_LT(max_abs_entry(conjugate(u, maximally_mixed(3).matrix()) - maximally_mixed(3).matrix()),
            1e-15);
}

TEST(Thermal, ZeroTemperatureIsGround) {
  EXPECT_EQ(thermal_state({0.0, 5}).matrix(), pure_ground(5).matrix());
}

TEST(Thermal, QubitAtUnitOccupation) {
  const ComplexMatrix m = thermal_state({1.0, 2}).matrix();
  EXPECT_NEAR(m(0, 0).real(), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(m(1, 1).real(), 1.0 / 3.0, 1e-15);
}

TEST(Thermal, HighOccupationApproachesMaximallyMixed) {
  EXPECT_LT(max_abs_entry(thermal_state({1e6, 8}).matrix() - maximally_mixed(8).matrix()), 1e-4);
}

TEST(Thermal, WeightsStrictlyDecrease) {
  for (double nbar : {0.1, 1.0, 5.0, 100.0}) {
    const ComplexMatrix m = thermal_state({nbar, 6}).matrix();
    for (Eigen::Index k = 1; k < 6; ++k) EXPECT_LT(m(k, k).real(), m(k - 1, k - 1).real());
  }
}

TEST(Thermal, RejectsInvalidParameters) {
  EXPECT_THROW(thermal_state({-1.0, 4}), std::invalid_argument);
  EXPECT_THROW(thermal_state({std::numeric_limits<double>::infinity(), 4}), std::invalid_argument);
  EXPECT_THROW(thermal_state({1.0, 1}), std::invalid_argument);
}

TEST(EqualSuperposition, Values) {
  const DensityMatrix s = system_equal_superposition(2);
  EXPECT_LT(max_abs_entry(s.matrix() - ComplexMatrix::Constant(2, 2, 0.5)), 1e-15);
  const DensityMatrix s5 = system_equal_superposition(5);
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_NEAR(s5.matrix()(i, i).real(), 0.2, 1e-15);
  EXPECT_NEAR(s5.purity(), 1.0, 1e-12);
  EXPECT_THROW(system_equal_superposition(1), std::invalid_argument);
}

TEST(States, AllConstructorsAreValid) {
  for (std::size_t d : {2, 3, 7}) {
    EXPECT_TRUE(is_density_matrix(pure_ground(d).matrix(), 1e-12));
    EXPECT_TRUE(is_density_matrix(maximally_mixed(d).matrix(), 1e-12));
    EXPECT_TRUE(is_density_matrix(system_equal_superposition(d).matrix(), 1e-12));
    for (double nbar : {0.0, 0.5, 2.0, 100.0}) {
      EXPECT_TRUE(is_density_matrix(thermal_state({nbar, d}).matrix(), 1e-12));
    }
  }
}

}  // namespace
}  // namespace meq
