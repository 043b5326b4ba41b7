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
#include <cstdint>
#include <random>

#include "meq/qmatrix.hpp"

namespace meq {

/// Identifies one independent random stream. Every Monte Carlo sample in a
/// run gets its own (master_seed, stream_index) pair, so results do not
/// depend on which thread draws which sample.
struct RngSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

Engine make_engine(RngSeed seed);

/// GUE draw: H = (A + A^dagger) / 2, where A has iid entries x + iy with
/// x, y ~ Normal(0, 1/2). Off-diagonal entries then have E|H_mn|^2 = 1/2 and
/// the spectrum fills [-sqrt(2 dim), sqrt(2 dim)] for large dim.
/// Throws std::invalid_argument for dim < 2.
HermitianOperator sample_gue(std::size_t dim, RngSeed seed);
HermitianOperator sample_gue(std::size_t dim, Engine& engine);

/// Haar unitary from the QR decomposition of a complex Ginibre matrix,
/// with the phases of diag(R) absorbed into Q.
ComplexMatrix sample_haar_unitary(std::size_t dim, RngSeed seed);
ComplexMatrix sample_haar_unitary(std::size_t dim, Engine& engine);

/// Radius of the semicircle that the spectrum of sample_gue(dim) fills.
double gue_spectral_radius(std::size_t dim);

}  // namespace meq
