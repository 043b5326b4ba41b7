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

#include <cmath>
#include <stdexcept>
#include <string>

namespace meq {

DensityMatrix pure_ground(std::size_t dim) {
  if (dim < 1) throw std::invalid_argument("pure_ground: dim must be >= 1");
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  m(0, 0) = 1.0;
  return DensityMatrix::unchecked(std::move(m));
}

DensityMatrix maximally_mixed(std::size_t dim) {
  if (dim < 1) throw std::invalid_argument("maximally_mixed: dim must be >= 1");
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityMatrix::unchecked(ComplexMatrix::Identity(n, n) / static_cast<double>(dim));
}

DensityMatrix thermal_state(const ThermalParams& params) {
  if (params.dim < 2) {
    throw std::invalid_argument("thermal_state: dim must be >= 2, got " +
                                std::to_string(params.dim));
  }
  if (!std::isfinite(params.nbar) || params.nbar < 0.0) {
    throw std::invalid_argument("thermal_state: nbar must be finite and >= 0");
  }
  if (params.nbar == 0.0) return pure_ground(params.dim);

  const double ratio = params.nbar / (1.0 + params.nbar);
  const auto n = static_cast<Eigen::Index>(params.dim);
  RealVector w(n);
  double total = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    w[k] = std::pow(ratio, static_cast<double>(k));
    total += w[k];
  }
  w /= total;
  return DensityMatrix::unchecked(w.cast<Complex>().asDiagonal().toDenseMatrix());
}

DensityMatrix system_equal_superposition(std::size_t d_s) {
  if (d_s < 2) throw std::invalid_argument("system_equal_superposition: d_S must be >= 2");
  const auto n = static_cast<Eigen::Index>(d_s);
  return DensityMatrix::unchecked(ComplexMatrix::Constant(n, n, 1.0 / static_cast<double>(d_s)));
}

}  // namespace meq
