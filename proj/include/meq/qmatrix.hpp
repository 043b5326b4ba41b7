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

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace meq {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Max |A - A^dagger| entry accepted for Hermitian operators and states.
inline constexpr double kHermitianTol = 1e-10;
/// |tr(rho) - 1| accepted for density matrices.
inline constexpr double kTraceTol = 1e-10;
/// Most negative eigenvalue accepted for density matrices.
inline constexpr double kPsdTol = 1e-10;
/// Eigenvalues closer than this are treated as one eigenspace.
inline constexpr double kDegeneracyTol = 1e-8;
/// Negative eigenvalues down to -kFidelityClamp are zeroed before sqrt.
inline constexpr double kFidelityClamp = 1e-12;

/// Largest |a_ij - conj(a_ji)|.
double hermiticity_defect(const ComplexMatrix& a);
double max_abs_entry(const ComplexMatrix& a);

class HermitianOperator {
 public:
  /// Throws std::invalid_argument if `m` is not square or not Hermitian
  /// within kHermitianTol.
  explicit HermitianOperator(ComplexMatrix m);

  /// Wraps a matrix that is Hermitian by construction. The matrix is
  /// symmetrized so the stored value is exactly Hermitian.
  static HermitianOperator unchecked(ComplexMatrix m);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  struct Trusted {};
  HermitianOperator(ComplexMatrix m, Trusted) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

class DensityMatrix {
 public:
  /// Validates Hermiticity, unit trace and positivity (kPsdTol).
  explicit DensityMatrix(ComplexMatrix m);

  /// For values that are valid states by construction (pinchings,
  /// reductions, unitary conjugations of states). No eigen-solve.
  static DensityMatrix unchecked(ComplexMatrix m);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }
  double purity() const;

 private:
  struct Trusted {};
  DensityMatrix(ComplexMatrix m, Trusted) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

/// True when `m` satisfies every DensityMatrix invariant within `tol`.
bool is_density_matrix(const ComplexMatrix& m, double tol = kPsdTol);

/// Ascending eigenvalues; eigenvector columns are orthonormal.
struct SpectralDecomposition {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;

  std::size_t dim() const { return static_cast<std::size_t>(eigenvalues.size()); }
  ComplexMatrix reconstruct() const;
};

/// A state written as sum_n weights[n] |b_n><b_n| with orthonormal basis
/// columns b_n and nonnegative weights. Lets fidelities reuse a known
/// eigendecomposition instead of recomputing it.
struct FactoredState {
  ComplexMatrix basis;
  RealVector weights;

  std::size_t dim() const { return static_cast<std::size_t>(basis.rows()); }
  ComplexMatrix density() const;
};

/// Half-open [begin, end) index ranges of eigenvalues whose consecutive
/// spacings are all <= tol. Input must be sorted ascending.
std::vector<std::pair<std::size_t, std::size_t>> eigenspace_groups(const RealVector& eigenvalues,
                                                                   double tol = kDegeneracyTol);

/// Kronecker product. Composite index (i_a, i_b) maps to i_a * dim_b + i_b.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);
DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b);
FactoredState tensor_product(const FactoredState& a, const FactoredState& b);

/// Reduced state over the factors in `keep` (any order; output keeps the
/// original factor order). Throws std::invalid_argument on a dims/size
/// mismatch, an empty or out-of-range keep set, or repeated indices.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);

/// Lifts `op`, acting on the listed factors (ascending), to the full
/// space with identities on the remaining factors.
ComplexMatrix embed_operator(const ComplexMatrix& op, std::span<const std::size_t> dims,
                             std::span<const std::size_t> factors);

SpectralDecomposition eigh(const HermitianOperator& h);
/// Validates Hermiticity first; throws std::invalid_argument otherwise.
SpectralDecomposition eigh(const ComplexMatrix& h);

/// Eigendecomposition of a state with the fidelity clamp applied:
/// eigenvalues in [-kFidelityClamp, 16 d eps lambda_max] become 0,
/// anything more negative throws std::domain_error.
FactoredState factorize(const DensityMatrix& rho);

/// Uhlmann fidelity, squared convention: (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
/// Evaluated as the squared trace norm of sqrt(rho) sqrt(sigma).
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double fidelity(const FactoredState& rho, const FactoredState& sigma);

/// sum_n P_n rho P_n over the eigenspaces of `basis`, merged at kDegeneracyTol.
DensityMatrix pinching(const DensityMatrix& rho, const SpectralDecomposition& basis);

/// Unitary conjugation u * m * u^dagger.
ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& m);

}  // namespace meq
