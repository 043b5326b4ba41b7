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

#pragma once

#include <cmath>
#include <random>

#include "meq/ensembles.hpp"
#include "meq/qmatrix.hpp"

namespace meq::testing {

inline ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline ComplexMatrix ket_projector(const ComplexVector& v) { return v * v.adjoint() / v.squaredNorm(); }

inline DensityMatrix plus_state() { return DensityMatrix(ComplexMatrix::Constant(2, 2, 0.5)); }

/// Random full-rank mixed state G G^+ / tr with Gaussian G.
inline DensityMatrix random_state(std::size_t dim, Engine& engine) {
  std::normal_distribution<double> g(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(g(engine), g(engine));
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix::unchecked(0.5 * (rho + rho.adjoint()));
}

inline DensityMatrix random_pure_state(std::size_t dim, Engine& engine) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = Complex(g(engine), g(engine));
  return DensityMatrix::unchecked(ket_projector(v));
}

}  // namespace meq::testing
