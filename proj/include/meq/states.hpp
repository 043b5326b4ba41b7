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

#include <cstddef>

#include "meq/qmatrix.hpp"

namespace meq {

/// Truncated single-mode thermal field, described only by its mean
/// occupation nbar and the truncation dimension.
struct ThermalParams {
  double nbar = 0.0;
  std::size_t dim = 2;
};

/// |0><0|.
DensityMatrix pure_ground(std::size_t dim);

/// I / dim.
DensityMatrix maximally_mixed(std::size_t dim);

/// diag(w_0, ..., w_{d-1}) / sum(w) with w_n = (nbar / (1 + nbar))^n.
/// nbar = 0 gives pure_ground(dim). Throws std::invalid_argument for
/// nbar < 0, non-finite nbar, or dim < 2.
DensityMatrix thermal_state(const ThermalParams& params);

/// |psi><psi| with psi = d_S^{-1/2} sum_i |i>. Throws for d_S < 2.
DensityMatrix system_equal_superposition(std::size_t d_s);

}  // namespace meq
