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

// Reference computations that avoid the library's own numerical routes.
// They are slow and only meant for small instances.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// Decodes a flat index into per-factor digits, left factor most significant.
inline std::vector<std::size_t> digits(std::size_t index, const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> d(dims.size());
  for (std::size_t f = dims.size(); f-- > 0;) {
    d[f] = index % dims[f];
    index /= dims[f];
  }
  return d;
}

inline std::size_t flatten(const std::vector<std::size_t>& d, const std::vector<std::size_t>& dims) {
  std::size_t index = 0;
  for (std::size_t f = 0; f < dims.size(); ++f) index = index * dims[f] + d[f];
  return index;
}

// Sums rho over matching traced digits, one entry at a time.
inline Mat partial_trace(const Mat& rho, const std::vector<std::size_t>& dims,
                         const std::vector<std::size_t>& keep) {
  std::vector<std::size_t> kept_dims;
  for (std::size_t f : keep) kept_dims.push_back(dims[f]);
  std::size_t out_dim = 1;
  for (std::size_t d : kept_dims) out_dim *= d;
  Mat out = Mat::Zero(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(out_dim));
  const auto n = static_cast<std::size_t>(rho.rows());
  for (std::size_t r = 0; r < n; ++r) {
    const auto dr = digits(r, dims);
    for (std::size_t c = 0; c < n; ++c) {
      const auto dc = digits(c, dims);
      bool traced_equal = true;
      for (std::size_t f = 0; f < dims.size(); ++f) {
        if (std::find(keep.begin(), keep.end(), f) == keep.end() && dr[f] != dc[f]) {
          traced_equal = false;
        }
      }
      if (!traced_equal) continue;
      std::vector<std::size_t> kr, kc;
      for (std::size_t f : keep) {
        kr.push_back(dr[f]);
        kc.push_back(dc[f]);
      }
      out(static_cast<Eigen::Index>(flatten(kr, kept_dims)),
          static_cast<Eigen::Index>(flatten(kc, kept_dims))) += rho(static_cast<Eigen::Index>(r),
                                                                    static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

// (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 via two Hermitian square roots.
inline double fidelity(const Mat& rho, const Mat& sigma) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Mat s = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
  const Mat inner = s * sigma * s;
  Eigen::SelfAdjointEigenSolver<Mat> es2(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
  double t = 0.0;
  for (Eigen::Index i = 0; i < es2.eigenvalues().size(); ++i) {
    t += std::sqrt(std::max(es2.eigenvalues()[i], 0.0));
  }
  return t * t;
}

inline double trace_distance(const Mat& a, const Mat& b) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a - b, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// Best q0 tr(P rho0) + q1 tr((I-P) rho1) over rank-1 qubit projectors
// P = (I + n.sigma)/2 on a (theta, phi) grid, refined by repeated zooming
// around the best point; also tries P = 0 and P = I.
inline double helstrom_grid(double q0, const Mat& rho0, double q1, const Mat& rho1,
                            int points_per_axis = 100, int levels = 4) {
  const Mat delta = q0 * rho0 - q1 * rho1;
  const auto score = [&](double theta, double phi) {
    const double x = std::sin(theta) * std::cos(phi);
    const double y = std::sin(theta) * std::sin(phi);
    const double z = std::cos(theta);
    // tr(P delta) with P = (I + x X + y Y + z Z) / 2.
    const Complex tr = 0.5 * (delta(0, 0) + delta(1, 1)) +
                       0.5 * (x * (delta(0, 1) + delta(1, 0)) +
                              y * Complex(0, 1) * (delta(0, 1) - delta(1, 0)) +
                              z * (delta(0, 0) - delta(1, 1)));
    return q1 + tr.real();
  };
  double best = std::max(q0, q1);
  double theta_c = std::numbers::pi / 2, phi_c = std::numbers::pi;
  double theta_w = std::numbers::pi, phi_w = 2 * std::numbers::pi;
  for (int level = 0; level < levels; ++level) {
    double level_best = -1.0, bt = theta_c, bp = phi_c;
    for (int a = 0; a < points_per_axis; ++a) {
      const double theta = std::clamp(theta_c - theta_w / 2 + theta_w * (a + 0.5) / points_per_axis,
                                      0.0, std::numbers::pi);
      for (int b = 0; b < points_per_axis; ++b) {
        const double phi = phi_c - phi_w / 2 + phi_w * (b + 0.5) / points_per_axis;
        const double v = score(theta, phi);
        if (v > level_best) {
          level_best = v;
          bt = theta;
          bp = phi;
        }
      }
    }
    best = std::max(best, level_best);
    theta_c = bt;
    phi_c = bp;
    theta_w *= 4.0 / points_per_axis;
    phi_w *= 4.0 / points_per_axis;
  }
  return best;
}

// Riemann average of e^{-iHt} rho0 e^{iHt} over t = 0, dt, ..., (steps-1) dt,
// propagated with a matrix-exponential step.
inline Mat time_average(const Mat& h, const Mat& rho0, double dt, int steps) {
  const Mat step = (Complex(0, -dt) * h).exp();
  Mat rho = rho0;
  Mat sum = Mat::Zero(rho0.rows(), rho0.cols());
  for (int s = 0; s < steps; ++s) {
    sum += rho;
    rho = step * rho * step.adjoint();
  }
  return sum / static_cast<double>(steps);
}

// Average of (1/2) sum_i |tr(M_i (rho(t) - sigma))| over `times`, each
// rho(t) from its own matrix exponential.
inline double time_averaged_distinguishability(const Mat& h, const Mat& rho0,
                                               const std::vector<Mat>& povm, const Mat& sigma,
                                               const std::vector<double>& times) {
  double total = 0.0;
  for (double t : times) {
    const Mat u = (Complex(0, -t) * h).exp();
    const Mat diff = u * rho0 * u.adjoint() - sigma;
    double d = 0.0;
    for (const Mat& m : povm) d += std::abs((m * diff).trace().real());
    total += 0.5 * d;
  }
  return total / static_cast<double>(times.size());
}

// Semicircle density with radius r.
inline double semicircle(double x, double r) {
  return std::abs(x) >= r ? 0.0 : 2.0 / (std::numbers::pi * r * r) * std::sqrt(r * r - x * x);
}

}  // namespace oracle
