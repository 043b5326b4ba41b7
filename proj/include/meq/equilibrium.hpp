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
#include <vector>

#include "meq/qmatrix.hpp"

namespace meq {

/// Default cap on the global Hilbert-space dimension for operations that
/// materialize the full system plus environment.
inline constexpr std::size_t kDefaultDimensionCap = 1024;

/// System of dimension d_S coupled to N_E non-interacting sub-environments
/// through H = sum_i |i><i|_S (x) sum_l H_l^(i). Sub-environments start in
/// a product state; the system starts in the pure state with amplitudes
/// sqrt(p_i) in the pointer basis.
class BroadcastingModel {
 public:
  /// cond_hams[l][i] is the conditional Hamiltonian of sub-environment l
  /// for pointer outcome i. Throws std::invalid_argument when the
  /// probabilities do not sum to 1 (1e-12), are negative, or any
  /// dimension disagrees.
  BroadcastingModel(std::vector<double> pointer_probs,
                    std::vector<std::vector<HermitianOperator>> cond_hams,
                    std::vector<DensityMatrix> initial_sub_states);

  std::size_t d_s() const { return pointer_probs_.size(); }
  std::size_t num_sub_envs() const { return sub_env_dims_.size(); }
  const std::vector<double>& pointer_probs() const { return pointer_probs_; }
  const std::vector<std::size_t>& sub_env_dims() const { return sub_env_dims_; }
  const HermitianOperator& cond_ham(std::size_t l, std::size_t i) const { return cond_hams_[l][i]; }
  const std::vector<std::vector<HermitianOperator>>& cond_hams() const { return cond_hams_; }
  const std::vector<DensityMatrix>& initial_sub_states() const { return initial_sub_states_; }

  /// {d_S, d_1, ..., d_{N_E}}: the factor layout of the global space.
  std::vector<std::size_t> layout() const;
  std::size_t total_dim() const;

  DensityMatrix system_state() const;
  /// System state (x) all initial sub-environment states.
  DensityMatrix initial_state() const;

 private:
  std::vector<double> pointer_probs_;
  std::vector<std::size_t> sub_env_dims_;
  std::vector<std::vector<HermitianOperator>> cond_hams_;
  std::vector<DensityMatrix> initial_sub_states_;
};

/// p_i = 1 / d_S.
std::vector<double> equal_priors(std::size_t d_s);

/// Dephased state of one sub-environment under one conditional Hamiltonian.
struct ConditionalState {
  SpectralDecomposition hamiltonian;
  /// Eigen-decomposition of the dephased state itself.
  FactoredState factored;
  /// sum_n (tr[P_n rho_0])^2 over the Hamiltonian's eigenspaces. For a
  /// nondegenerate Hamiltonian this is sum_n <E_n|rho_0|E_n>^2.
  double overlap_sum = 0.0;

  DensityMatrix state() const { return DensityMatrix::unchecked(factored.density()); }
};

ConditionalState conditional_state(const HermitianOperator& h, const DensityMatrix& rho0);

struct ConditionalStateSet {
  /// states[l][i] for sub-environment l and pointer outcome i.
  std::vector<std::vector<ConditionalState>> states;

  double overlap_sum(std::size_t l, std::size_t i) const { return states[l][i].overlap_sum; }
};

ConditionalStateSet conditional_equilibrium_states(const BroadcastingModel& model);

/// Partition of sub-environment indices into observer systems.
class ObserverGrouping {
 public:
  /// Throws std::invalid_argument unless `groups` covers 0..num_sub_envs-1
  /// exactly once with no empty group. Indices inside a group are sorted.
  ObserverGrouping(std::size_t num_sub_envs, std::vector<std::vector<std::size_t>> groups);

  /// Consecutive groups of `group_size`; the last group may be shorter.
  static ObserverGrouping contiguous(std::size_t num_sub_envs, std::size_t group_size);
  /// One observer per sub-environment.
  static ObserverGrouping singletons(std::size_t num_sub_envs);

  std::size_t num_observers() const { return groups_.size(); }
  std::size_t num_sub_envs() const { return num_sub_envs_; }
  const std::vector<std::size_t>& group(std::size_t k) const { return groups_[k]; }

 private:
  std::size_t num_sub_envs_;
  std::vector<std::vector<std::size_t>> groups_;
};

/// rho_k^(i) = (x)_{l in group k} rho_l^(i), one factored state per outcome i.
std::vector<FactoredState> observer_conditional_states(const ConditionalStateSet& set,
                                                       const ObserverGrouping& grouping,
                                                       std::size_t k);

/// H = sum_i |i><i| (x) sum_l H_l^(i), with each H_l^(i) embedded on its
/// own factor. Throws std::length_error when the global dimension exceeds `cap`.
HermitianOperator assemble_total_hamiltonian(const BroadcastingModel& model,
                                             std::size_t cap = kDefaultDimensionCap);

/// e^{-iHt} rho e^{iHt} (hbar = 1).
DensityMatrix evolve(const HermitianOperator& h_total, const DensityMatrix& rho0, double t);
DensityMatrix evolve(const SpectralDecomposition& h_eig, const DensityMatrix& rho0, double t);

/// Infinite-time average: pinching of rho0 in the eigenbasis of h_total.
DensityMatrix equilibrium_state_general(const HermitianOperator& h_total,
                                        const DensityMatrix& rho0);

/// [sum_n (tr P_n rho0)^2]^{-1} over eigenspaces merged at kDegeneracyTol.
double effective_dimension_general(const HermitianOperator& h_total, const DensityMatrix& rho0);
double effective_dimension_general(const SpectralDecomposition& h_eig, const DensityMatrix& rho0);

/// [sum_i p_i^2 prod_l overlaps[l][i]]^{-1}.
double effective_dimension_from_overlaps(const std::vector<double>& pointer_probs,
                                         const std::vector<std::vector<double>>& overlaps);

/// Factorized effective dimension of a broadcasting model; never builds
/// the global space.
double effective_dimension_broadcast(const BroadcastingModel& model,
                                     const ConditionalStateSet& set);

/// d_S / (4 sqrt(d_eff)). Throws std::invalid_argument if d_eff < 1.
double equilibration_error(std::size_t d_s, double d_eff);

}  // namespace meq
