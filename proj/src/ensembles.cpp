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

#include "meq/ensembles.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/QR>

namespace meq {

namespace {

void require_dim(std::size_t dim, const char* what) {
  if (dim < 2) {
    throw std::invalid_argument(std::string(what) + ": dim must be >= 2, got " +
                                std::to_string(dim));
  }
}

ComplexMatrix ginibre(std::size_t dim, Engine& engine, double component_variance) {
  std::normal_distribution<double> normal(0.0, std::sqrt(component_variance));
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexMatrix a(n, n);
  // Fill in a fixed (row-major) order so streams are reproducible.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = normal(engine);
      const double im = normal(engine);
      a(i, j) = Complex(re, im);
    }
  }
  return a;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Engine make_engine(RngSeed seed) {
  const std::uint64_t a = mix64(seed.master_seed);
  const std::uint64_t b = mix64(a ^ mix64(seed.stream_index + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Engine(seq);
}

HermitianOperator sample_gue(std::size_t dim, Engine& engine) {
  require_dim(dim, "sample_gue");
  ComplexMatrix a = ginibre(dim, engine, 0.5);
  return HermitianOperator::unchecked((a + a.adjoint()) * 0.5);
}

HermitianOperator sample_gue(std::size_t dim, RngSeed seed) {
  Engine engine = make_engine(seed);
  return sample_gue(dim, engine);
}

ComplexMatrix sample_haar_unitary(std::size_t dim, Engine& engine) {
  require_dim(dim, "sample_haar_unitary");
  const ComplexMatrix z = ginibre(dim, engine, 0.5);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    const double mag = std::abs(d);
    q.col(k) *= mag > 0.0 ? d / mag : Complex(1.0, 0.0);
  }
  return q;
}

ComplexMatrix sample_haar_unitary(std::size_t dim, RngSeed seed) {
  Engine engine = make_engine(seed);
  return sample_haar_unitary(dim, engine);
}

double gue_spectral_radius(std::size_t dim) { return std::sqrt(2.0 * static_cast<double>(dim)); }

}  // namespace meq
