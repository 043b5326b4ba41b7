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
#include <span>
#include <vector>

#include "meq/equilibrium.hpp"
#include "meq/qmatrix.hpp"

namespace meq {

inline constexpr double kProjectorTol = 1e-10;
inline constexpr double kHelstromTieTol = 1e-10;
/// Absolute slack allowed for finite time grids in verify_error_bound.
inline constexpr double kBoundSlack = 0.02;

struct DiscriminationResult {
  /// projectors[i] detects outcome i; mutually orthogonal, summing to I.
  std::vector<HermitianOperator> projectors;
  double success_prob = 0.0;
  std::vector<double> priors;
};

/// Optimal minimum-error measurement for two states.
///
/// Diagonalizes q0 rho0 - q1 rho1. Eigenvectors with eigenvalue above `tol`
/// go to outcome 0, those below -tol to outcome 1, and eigenvectors with
/// |eigenvalue| <= tol alternate between outcomes 0 and 1 in ascending
/// order, starting with 0. With dim >= 2 and no strictly positive or
/// negative part, both projectors therefore have rank >= 1.
///
/// Throws std::invalid_argument if the priors are negative or do not sum
/// to 1 within 1e-12, or if the dimensions differ.
DiscriminationResult helstrom_projectors(double q0, const DensityMatrix& rho0, double q1,
                                         const DensityMatrix& rho1,
                                         double tol = kHelstromTieTol);

/// sum_i q_i tr(rho_i Pi_i). Throws std::invalid_argument unless the
/// projectors are idempotent, pairwise orthogonal, and sum to I (1e-10).
double success_probability(std::span<const double> q, std::span<const DensityMatrix> states,
                           std::span<const HermitianOperator> projectors);

/// Validated POVM: positive elements summing to the identity within 1e-10.
class Povm {
 public:
  explicit Povm(std::vector<ComplexMatrix> elements);

  std::size_t dim() const { return static_cast<std::size_t>(elements_.front().rows()); }
  std::size_t size() const { return elements_.size(); }
  const std::vector<ComplexMatrix>& elements() const { return elements_; }

 private:
  std::vector<ComplexMatrix> elements_;
};

/// (1/2) sum_i |tr(M_i rho1) - tr(M_i rho2)|.
double distinguishability(const Povm& measurement, const DensityMatrix& rho1,
                          const DensityMatrix& rho2);
/// Convenience overload; validates the POVM on each call.
double distinguishability(std::span<const HermitianOperator> outcome_ops,
                          const DensityMatrix& rho1, const DensityMatrix& rho2);

/// Observable sum_i c_i (1_S (x) Pi_k^i (x) 1_rest) for observer k. Kept in
/// factored form; outcome_operators() materializes the global matrices.
struct ObjectifyingObservable {
  std::size_t observer_index = 0;
  std::vector<HermitianOperator> projectors;
  /// Factor dimensions of the global space, system first.
  std::vector<std::size_t> layout;
  /// Global factor indices occupied by the observer system (ascending).
  std::vector<std::size_t> factors;
  /// Outcome values c_{i,k}. Carried along, never used in error terms.
  std::vector<double> outcome_labels;

  std::vector<ComplexMatrix> outcome_operators() const;
  ComplexMatrix observable() const;
};

/// Labels default to c_i = i.
ObjectifyingObservable make_objectifying_observable(std::size_t observer_index,
                                                    std::vector<HermitianOperator> projectors,
                                                    std::vector<std::size_t> layout,
                                                    std::vector<std::size_t> factors);

/// sum_i q_i |i><i|_S (x)_k sigma_k^(i) with sigma_k^(i) = Pi_k^i / tr(Pi_k^i).
struct SbsCandidate {
  std::vector<double> pointer_probs;
  /// branch_states[k][i].
  std::vector<std::vector<DensityMatrix>> branch_states;

  /// Global matrix on `layout` (system first); observer k occupies the
  /// ascending global factors observer_factors[k]. For small instances.
  DensityMatrix assemble(std::span<const std::size_t> layout,
                         const std::vector<std::vector<std::size_t>>& observer_factors) const;
};

/// per_observer_projectors[k][i]. Throws std::domain_error if a projector
/// with q_i > 0 has rank zero, std::invalid_argument on shape mismatches.
/// Zero-weight outcomes may have empty projectors.
SbsCandidate candidate_sbs(std::span<const double> q,
                           const std::vector<std::vector<HermitianOperator>>& per_observer_projectors);

/// sum over ordered pairs i != j of sqrt(q_i q_j) F(rho_i, rho_j).
double objectivity_error(std::span<const double> q, std::span<const DensityMatrix> states);
double objectivity_error(std::span<const double> q, std::span<const FactoredState> states);

struct ErrorBoundReport {
  /// Pointer weights of the equilibrium state.
  std::vector<double> q;
  double e_obj = 0.0;
  double e_eq = 0.0;
  double d_eff = 0.0;
  /// e_obj + e_eq.
  double bound = 0.0;
  /// Time average of D_O(rho(t), rho_eq^SBS) over the grid.
  double empirical_average = 0.0;
  /// bound - empirical_average.
  double margin = 0.0;
  /// D_O(rho_eq, rho_eq^SBS); never exceeds e_obj.
  double equilibrium_distinguishability = 0.0;
  /// Time average of D_O(rho(t), rho_eq).
  double equilibration_average = 0.0;
  double success_prob = 0.0;
  std::size_t time_samples = 0;
  double time_span = 0.0;
  double min_gap = 0.0;
  bool passed = false;
};

/// Smallest spacing between distinct eigenvalues (merged at kDegeneracyTol).
/// Returns 0 when the spectrum has a single eigenspace.
double min_energy_gap(const SpectralDecomposition& h_eig);

/// `samples` stratified times in [0, span_factor / min_gap): one uniform
/// draw per equal-width stratum, ascending.
std::vector<double> make_time_grid(const SpectralDecomposition& h_eig, std::size_t samples,
                                   std::uint64_t seed, double span_factor = 200.0);

/// Builds rho(t) on the grid, the Helstrom-based objectifying observable for
/// observer k, and the equilibrium-proximate SBS state, and compares the
/// time-averaged distinguishability with e_obj + e_eq. Requires d_S = 2.
///
/// Throws std::length_error past the dimension cap and
/// std::invalid_argument when the grid has fewer than 1000 points or spans
/// less than 100 / min_gap.
ErrorBoundReport verify_error_bound(const BroadcastingModel& model,
                                    const ObserverGrouping& grouping, std::size_t k,
                                    std::span<const double> time_grid,
                                    std::size_t cap = kDefaultDimensionCap);

/// Same, for an arbitrary Hamiltonian and initial state on `layout`
/// (system factor first, then sub-environments grouped by `grouping`).
ErrorBoundReport verify_error_bound_general(const HermitianOperator& h_total,
                                            const DensityMatrix& rho0,
                                            std::span<const std::size_t> layout,
                                            const ObserverGrouping& grouping, std::size_t k,
                                            std::span<const double> time_grid);

}  // namespace meq
