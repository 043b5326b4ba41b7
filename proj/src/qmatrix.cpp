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

#include "meq/qmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>

namespace meq {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square and nonempty, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    }
  }
  return true;
}

ComplexMatrix symmetrized(ComplexMatrix m) {
  ComplexMatrix h = (m + m.adjoint()) * 0.5;
  return h;
}

std::size_t product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

// For every global index: (index over `selected` factors in listed order,
// index over the remaining factors in ascending order).
struct IndexSplit {
  std::vector<std::size_t> selected;
  std::vector<std::size_t> rest;
  std::size_t selected_dim = 1;
  std::size_t rest_dim = 1;
};

IndexSplit split_indices(std::span<const std::size_t> dims, std::span<const std::size_t> factors) {
  const std::size_t n = dims.size();
  std::vector<int> position(n, -1);
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (factors[k] >= n) {
      throw std::invalid_argument("factor index " + std::to_string(factors[k]) +
                                  " out of range for " + std::to_string(n) + " factors");
    }
    if (position[factors[k]] != -1) {
      throw std::invalid_argument("factor index " + std::to_string(factors[k]) + " repeated");
    }
    position[factors[k]] = static_cast<int>(k);
  }
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("factor dimensions must be positive");
  }

  IndexSplit out;
  const std::size_t total = product(dims);
  out.selected.resize(total);
  out.rest.resize(total);

  // Stride of each factor inside the selected / rest composite indices.
  std::vector<std::size_t> stride(n, 0);
  std::size_t s = 1;
  for (std::size_t k = factors.size(); k-- > 0;) {
    stride[factors[k]] = s;
    s *= dims[factors[k]];
  }
  out.selected_dim = s;
  std::size_t r = 1;
  for (std::size_t f = n; f-- > 0;) {
    if (position[f] == -1) {
      stride[f] = r;
      r *= dims[f];
    }
  }
  out.rest_dim = r;

  std::vector<std::size_t> digit(n, 0);
  for (std::size_t g = 0; g < total; ++g) {
    std::size_t sel = 0, rst = 0;
    for (std::size_t f = 0; f < n; ++f) {
      if (position[f] == -1) {
        rst += digit[f] * stride[f];
      } else {
        sel += digit[f] * stride[f];
      }
    }
    out.selected[g] = sel;
    out.rest[g] = rst;
    for (std::size_t f = n; f-- > 0;) {
      if (++digit[f] < dims[f]) break;
      digit[f] = 0;
    }
  }
  return out;
}

// table[t * selected_dim + s] = global index with rest index t, selected index s.
std::vector<std::size_t> global_table(const IndexSplit& split) {
  std::vector<std::size_t> table(split.selected.size());
  for (std::size_t g = 0; g < split.selected.size(); ++g) {
    table[split.rest[g] * split.selected_dim + split.selected[g]] = g;
  }
  return table;
}

}  // namespace

double hermiticity_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return max_abs_entry(a - a.adjoint());
}

double max_abs_entry(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

HermitianOperator::HermitianOperator(ComplexMatrix m) {
  require_square(m, "HermitianOperator");
  if (!all_finite(m)) throw std::invalid_argument("HermitianOperator: non-finite entry");
  const double defect = hermiticity_defect(m);
  if (defect > kHermitianTol) {
    throw std::invalid_argument("HermitianOperator: hermiticity defect " + std::to_string(defect) +
                                " exceeds tolerance");
  }
  m_ = symmetrized(std::move(m));
}

HermitianOperator HermitianOperator::unchecked(ComplexMatrix m) {
  return HermitianOperator(symmetrized(std::move(m)), Trusted{});
}

bool is_density_matrix(const ComplexMatrix& m, double tol) {
  if (m.rows() == 0 || m.rows() != m.cols() || !all_finite(m)) return false;
  if (hermiticity_defect(m) > tol) return false;
  if (std::abs(m.trace().real() - 1.0) > tol || std::abs(m.trace().imag()) > tol) return false;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(symmetrized(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

DensityMatrix::DensityMatrix(ComplexMatrix m) {
  require_square(m, "DensityMatrix");
  if (!all_finite(m)) throw std::invalid_argument("DensityMatrix: non-finite entry");
  const double defect = hermiticity_defect(m);
  if (defect > kHermitianTol) {
    throw std::invalid_argument("DensityMatrix: hermiticity defect " + std::to_string(defect) +
                                " exceeds tolerance");
  }
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw std::invalid_argument("DensityMatrix: trace " + std::to_string(tr) + " is not 1");
  }
  ComplexMatrix h = symmetrized(std::move(m));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()));
  }
  m_ = std::move(h);
}

DensityMatrix DensityMatrix::unchecked(ComplexMatrix m) {
  return DensityMatrix(symmetrized(std::move(m)), Trusted{});
}

double DensityMatrix::purity() const {
  // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return m_.cwiseAbs2().sum();
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

ComplexMatrix FactoredState::density() const {
  return basis * weights.cast<Complex>().asDiagonal() * basis.adjoint();
}

std::vector<std::pair<std::size_t, std::size_t>> eigenspace_groups(const RealVector& eigenvalues,
                                                                   double tol) {
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  const auto n = static_cast<std::size_t>(eigenvalues.size());
  std::size_t begin = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    if (k == n || eigenvalues[static_cast<Eigen::Index>(k)] -
                          eigenvalues[static_cast<Eigen::Index>(k - 1)] >
                      tol) {
      groups.emplace_back(begin, k);
      begin = k;
    }
  }
  return groups;
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::unchecked(tensor_product(a.matrix(), b.matrix()));
}

FactoredState tensor_product(const FactoredState& a, const FactoredState& b) {
  FactoredState out;
  out.basis = tensor_product(a.basis, b.basis);
  out.weights.resize(a.weights.size() * b.weights.size());
  for (Eigen::Index i = 0; i < a.weights.size(); ++i) {
    out.weights.segment(i * b.weights.size(), b.weights.size()) = a.weights[i] * b.weights;
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  if (product(dims) != rho.dim()) {
    throw std::invalid_argument("partial_trace: product of dims " + std::to_string(product(dims)) +
                                " does not match state dimension " + std::to_string(rho.dim()));
  }
  std::vector<std::size_t> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  const IndexSplit split = split_indices(dims, sorted);
  const std::vector<std::size_t> table = global_table(split);
  const auto kd = static_cast<Eigen::Index>(split.selected_dim);

  const ComplexMatrix& m = rho.matrix();
  ComplexMatrix out = ComplexMatrix::Zero(kd, kd);
  for (std::size_t t = 0; t < split.rest_dim; ++t) {
    const std::size_t* row = &table[t * split.selected_dim];
    for (Eigen::Index b = 0; b < kd; ++b) {
      for (Eigen::Index a = 0; a < kd; ++a) {
        out(a, b) += m(static_cast<Eigen::Index>(row[a]), static_cast<Eigen::Index>(row[b]));
      }
    }
  }
  return DensityMatrix::unchecked(std::move(out));
}

ComplexMatrix embed_operator(const ComplexMatrix& op, std::span<const std::size_t> dims,
                             std::span<const std::size_t> factors) {
  if (factors.empty()) throw std::invalid_argument("embed_operator: empty factor list");
  if (!std::is_sorted(factors.begin(), factors.end())) {
    throw std::invalid_argument("embed_operator: factors must be ascending");
  }
  const IndexSplit split = split_indices(dims, factors);
  if (static_cast<std::size_t>(op.rows()) != split.selected_dim || op.rows() != op.cols()) {
    throw std::invalid_argument("embed_operator: operator dimension " + std::to_string(op.rows()) +
                                " does not match factors (" + std::to_string(split.selected_dim) +
                                ")");
  }
  const std::vector<std::size_t> table = global_table(split);
  const auto total = static_cast<Eigen::Index>(split.selected.size());
  const auto sd = static_cast<Eigen::Index>(split.selected_dim);
  ComplexMatrix out = ComplexMatrix::Zero(total, total);
  for (std::size_t t = 0; t < split.rest_dim; ++t) {
    const std::size_t* row = &table[t * split.selected_dim];
    for (Eigen::Index b = 0; b < sd; ++b) {
      for (Eigen::Index a = 0; a < sd; ++a) {
        out(static_cast<Eigen::Index>(row[a]), static_cast<Eigen::Index>(row[b])) = op(a, b);
      }
    }
  }
  return out;
}

SpectralDecomposition eigh(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix(), Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigh: eigensolver did not converge");
  }
  return SpectralDecomposition{es.eigenvalues(), es.eigenvectors()};
}

SpectralDecomposition eigh(const ComplexMatrix& h) { return eigh(HermitianOperator(h)); }

FactoredState factorize(const DensityMatrix& rho) {
  SpectralDecomposition sd = eigh(HermitianOperator::unchecked(rho.matrix()));
  // Eigenvalues at the solver's roundoff scale are zero; keeping them would
  // add sqrt(roundoff) ~ 1e-8 errors to fidelities of rank-deficient states.
  const double roundoff = 16.0 * static_cast<double>(rho.dim()) *
                          std::numeric_limits<double>::epsilon() * sd.eigenvalues.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < sd.eigenvalues.size(); ++k) {
    double& v = sd.eigenvalues[k];
    if (v < -kFidelityClamp) {
      throw std::domain_error("factorize: eigenvalue " + std::to_string(v) +
                              " is below the clamp threshold");
    }
    if (v <= roundoff) v = 0.0;
  }
  return FactoredState{std::move(sd.eigenvectors), std::move(sd.eigenvalues)};
}

double fidelity(const FactoredState& rho, const FactoredState& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw std::invalid_argument("fidelity: dimension mismatch " + std::to_string(rho.dim()) +
                                " vs " + std::to_string(sigma.dim()));
  }
  // Only columns with positive weight contribute.
  auto support = [](const FactoredState& s, ComplexMatrix& cols) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < s.weights.size(); ++k) {
      if (s.weights[k] > 0.0) keep.push_back(k);
    }
    cols.resize(s.basis.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
      cols.col(static_cast<Eigen::Index>(c)) = s.basis.col(keep[c]) * std::sqrt(s.weights[keep[c]]);
    }
  };
  ComplexMatrix a, b;
  support(rho, a);
  support(sigma, b);
  if (a.cols() == 0 || b.cols() == 0) return 0.0;

  // sqrt(rho) sqrt(sigma) = U_a diag(sqrt w_a) (U_a^+ U_b) diag(sqrt w_b) U_b^+;
  // its trace norm equals that of a^+ b.
  const ComplexMatrix overlap = a.adjoint() * b;
  double nuclear = 0.0;
  if (overlap.rows() == 1 || overlap.cols() == 1) {
    nuclear = overlap.norm();
  } else {
    Eigen::BDCSVD<ComplexMatrix> svd(overlap);
    nuclear = svd.singularValues().sum();
  }
  return std::clamp(nuclear * nuclear, 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw std::invalid_argument("fidelity: dimension mismatch " + std::to_string(rho.dim()) +
                                " vs " + std::to_string(sigma.dim()));
  }
  return fidelity(factorize(rho), factorize(sigma));
}

DensityMatrix pinching(const DensityMatrix& rho, const SpectralDecomposition& basis) {
  if (rho.dim() != basis.dim()) {
    throw std::invalid_argument("pinching: dimension mismatch " + std::to_string(rho.dim()) +
                                " vs " + std::to_string(basis.dim()));
  }
  const ComplexMatrix& v = basis.eigenvectors;
  ComplexMatrix c = v.adjoint() * rho.matrix() * v;
  ComplexMatrix kept = ComplexMatrix::Zero(c.rows(), c.cols());
  for (auto [begin, end] : eigenspace_groups(basis.eigenvalues)) {
    const auto b = static_cast<Eigen::Index>(begin);
    const auto n = static_cast<Eigen::Index>(end - begin);
    kept.block(b, b, n, n) = c.block(b, b, n, n);
  }
  return DensityMatrix::unchecked(v * kept * v.adjoint());
}

ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& m) {
  return u * m * u.adjoint();
}

}  // namespace meq
