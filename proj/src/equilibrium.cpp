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

#include "meq/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace meq {

namespace {

// Rounding slack when checking d_eff >= 1.
constexpr double kDeffSlack = 1e-9;

double clamp_population(double p) {
  if (p < -kFidelityClamp) {
    throw std::domain_error("negative eigenspace population " + std::to_string(p));
  }
  return std::max(p, 0.0);
}

}  // namespace

BroadcastingModel::BroadcastingModel(std::vector<double> pointer_probs,
                                     std::vector<std::vector<HermitianOperator>> cond_hams,
                                     std::vector<DensityMatrix> initial_sub_states)
    : pointer_probs_(std::move(pointer_probs)),
      cond_hams_(std::move(cond_hams)),
      initial_sub_states_(std::move(initial_sub_states)) {
  if (pointer_probs_.size() < 2) {
    throw std::invalid_argument("BroadcastingModel: need at least two pointer outcomes");
  }
  double total = 0.0;
  for (double p : pointer_probs_) {
    if (!(p >= 0.0)) throw std::invalid_argument("BroadcastingModel: negative pointer probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("BroadcastingModel: pointer probabilities sum to " +
                                std::to_string(total));
  }
  if (initial_sub_states_.empty()) {
    throw std::invalid_argument("BroadcastingModel: need at least one sub-environment");
  }
  if (cond_hams_.size() != initial_sub_states_.size()) {
    throw std::invalid_argument("BroadcastingModel: " + std::to_string(cond_hams_.size()) +
                                " Hamiltonian rows for " +
                                std::to_string(initial_sub_states_.size()) + " sub-environments");
  }
  for (std::size_t l = 0; l < initial_sub_states_.size(); ++l) {
    const std::size_t d = initial_sub_states_[l].dim();
    sub_env_dims_.push_back(d);
    if (cond_hams_[l].size() != pointer_probs_.size()) {
      throw std::invalid_argument("BroadcastingModel: sub-environment " + std::to_string(l) +
                                  " needs one Hamiltonian per pointer outcome");
    }
    for (const HermitianOperator& h : cond_hams_[l]) {
      if (h.dim() != d) {
        throw std::invalid_argument("BroadcastingModel: Hamiltonian dimension " +
                                    std::to_string(h.dim()) + " != sub-environment dimension " +
                                    std::to_string(d));
      }
    }
  }
}

std::vector<std::size_t> BroadcastingModel::layout() const {
  std::vector<std::size_t> dims{d_s()};
  dims.insert(dims.end(), sub_env_dims_.begin(), sub_env_dims_.end());
  return dims;
}

std::size_t BroadcastingModel::total_dim() const {
  return std::accumulate(sub_env_dims_.begin(), sub_env_dims_.end(), d_s(), std::multiplies<>());
}

DensityMatrix BroadcastingModel::system_state() const {
  const auto n = static_cast<Eigen::Index>(d_s());
  ComplexVector psi(n);
  for (Eigen::Index i = 0; i < n; ++i) psi[i] = std::sqrt(pointer_probs_[static_cast<std::size_t>(i)]);
  return DensityMatrix::unchecked(psi * psi.adjoint());
}

DensityMatrix BroadcastingModel::initial_state() const {
  DensityMatrix rho = system_state();
  for (const DensityMatrix& sub : initial_sub_states_) rho = tensor_product(rho, sub);
  return rho;
}

std::vector<double> equal_priors(std::size_t d_s) {
  if (d_s == 0) throw std::invalid_argument("equal_priors: d_S must be positive");
  return std::vector<double>(d_s, 1.0 / static_cast<double>(d_s));
}

ConditionalState conditional_state(const HermitianOperator& h, const DensityMatrix& rho0) {
  if (h.dim() != rho0.dim()) {
    throw std::invalid_argument("conditional_state: dimension mismatch " +
                                std::to_string(h.dim()) + " vs " + std::to_string(rho0.dim()));
  }
  ConditionalState out;
  out.hamiltonian = eigh(h);
  const ComplexMatrix& v = out.hamiltonian.eigenvectors;
  const ComplexMatrix c = v.adjoint() * rho0.matrix() * v;

  const auto n = static_cast<Eigen::Index>(h.dim());
  out.factored.basis.resize(n, n);
  out.factored.weights.resize(n);
  for (auto [begin, end] : eigenspace_groups(out.hamiltonian.eigenvalues)) {
    const auto b = static_cast<Eigen::Index>(begin);
    const auto m = static_cast<Eigen::Index>(end - begin);
    double population = 0.0;
    if (m == 1) {
      const double w = clamp_population(c(b, b).real());
      out.factored.basis.col(b) = v.col(b);
      out.factored.weights[b] = w;
      population = w;
    } else {
      // Degenerate eigenspace: the dephased block keeps its coherences, so
      // diagonalize it to get the state's own eigenbasis.
      const ComplexMatrix block = c.block(b, b, m, m);
      const SpectralDecomposition inner = eigh(HermitianOperator::unchecked(block));
      out.factored.basis.middleCols(b, m) = v.middleCols(b, m) * inner.eigenvectors;
      for (Eigen::Index k = 0; k < m; ++k) {
        out.factored.weights[b + k] = clamp_population(inner.eigenvalues[k]);
      }
      population = block.trace().real();
    }
    out.overlap_sum += population * population;
  }
  return out;
}

ConditionalStateSet conditional_equilibrium_states(const BroadcastingModel& model) {
  ConditionalStateSet set;
  set.states.resize(model.num_sub_envs());
  for (std::size_t l = 0; l < model.num_sub_envs(); ++l) {
    set.states[l].reserve(model.d_s());
    for (std::size_t i = 0; i < model.d_s(); ++i) {
      set.states[l].push_back(conditional_state(model.cond_ham(l, i), model.initial_sub_states()[l]));
    }
  }
  return set;
}

ObserverGrouping::ObserverGrouping(std::size_t num_sub_envs,
                                   std::vector<std::vector<std::size_t>> groups)
    : num_sub_envs_(num_sub_envs), groups_(std::move(groups)) {
  std::vector<int> seen(num_sub_envs, 0);
  for (auto& g : groups_) {
    if (g.empty()) throw std::invalid_argument("ObserverGrouping: empty observer group");
    std::sort(g.begin(), g.end());
    for (std::size_t l : g) {
      if (l >= num_sub_envs) {
        throw std::invalid_argument("ObserverGrouping: sub-environment index " +
                                    std::to_string(l) + " out of range");
      }
      if (seen[l]++) {
        throw std::invalid_argument("ObserverGrouping: sub-environment " + std::to_string(l) +
                                    " assigned twice");
      }
    }
  }
  for (std::size_t l = 0; l < num_sub_envs; ++l) {
    if (!seen[l]) {
      throw std::invalid_argument("ObserverGrouping: sub-environment " + std::to_string(l) +
                                  " not assigned");
    }
  }
}

ObserverGrouping ObserverGrouping::contiguous(std::size_t num_sub_envs, std::size_t group_size) {
  if (group_size == 0) throw std::invalid_argument("ObserverGrouping: group size must be positive");
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t l = 0; l < num_sub_envs; ++l) {
    if (l % group_size == 0) groups.emplace_back();
    groups.back().push_back(l);
  }
  return ObserverGrouping(num_sub_envs, std::move(groups));
}

ObserverGrouping ObserverGrouping::singletons(std::size_t num_sub_envs) {
  return contiguous(num_sub_envs, 1);
}

std::vector<FactoredState> observer_conditional_states(const ConditionalStateSet& set,
                                                       const ObserverGrouping& grouping,
                                                       std::size_t k) {
  if (k >= grouping.num_observers()) {
    throw std::invalid_argument("observer index " + std::to_string(k) + " out of range");
  }
  if (grouping.num_sub_envs() != set.states.size()) {
    throw std::invalid_argument("grouping does not match the number of sub-environments");
  }
  const auto& members = grouping.group(k);
  const std::size_t d_s = set.states[members.front()].size();
  std::vector<FactoredState> out;
  out.reserve(d_s);
  for (std::size_t i = 0; i < d_s; ++i) {
    FactoredState acc = set.states[members.front()][i].factored;
    for (std::size_t m = 1; m < members.size(); ++m) {
      acc = tensor_product(acc, set.states[members[m]][i].factored);
    }
    out.push_back(std::move(acc));
  }
  return out;
}

HermitianOperator assemble_total_hamiltonian(const BroadcastingModel& model, std::size_t cap) {
  const std::size_t total = model.total_dim();
  if (total > cap) {
    throw std::length_error("assemble_total_hamiltonian: global dimension " +
                            std::to_string(total) + " exceeds cap " + std::to_string(cap));
  }
  const std::vector<std::size_t>& env_dims = model.sub_env_dims();
  const auto d_env = static_cast<Eigen::Index>(total / model.d_s());
  ComplexMatrix h = ComplexMatrix::Zero(static_cast<Eigen::Index>(total),
                                        static_cast<Eigen::Index>(total));
  for (std::size_t i = 0; i < model.d_s(); ++i) {
    ComplexMatrix block = ComplexMatrix::Zero(d_env, d_env);
    for (std::size_t l = 0; l < model.num_sub_envs(); ++l) {
      const std::size_t factor[] = {l};
      block += embed_operator(model.cond_ham(l, i).matrix(), env_dims, factor);
    }
    const auto offset = static_cast<Eigen::Index>(i) * d_env;
    h.block(offset, offset, d_env, d_env) = block;
  }
  return HermitianOperator::unchecked(std::move(h));
}

DensityMatrix evolve(const SpectralDecomposition& h_eig, const DensityMatrix& rho0, double t) {
  if (h_eig.dim() != rho0.dim()) {
    throw std::invalid_argument("evolve: dimension mismatch " + std::to_string(h_eig.dim()) +
                                " vs " + std::to_string(rho0.dim()));
  }
  const ComplexMatrix& v = h_eig.eigenvectors;
  ComplexVector phases(h_eig.eigenvalues.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases[k] = std::polar(1.0, -h_eig.eigenvalues[k] * t);
  }
  const ComplexMatrix u = v * phases.asDiagonal() * v.adjoint();
  return DensityMatrix::unchecked(u * rho0.matrix() * u.adjoint());
}

DensityMatrix evolve(const HermitianOperator& h_total, const DensityMatrix& rho0, double t) {
  if (h_total.dim() != rho0.dim()) {
    throw std::invalid_argument("evolve: dimension mismatch " + std::to_string(h_total.dim()) +
                                " vs " + std::to_string(rho0.dim()));
  }
  return evolve(eigh(h_total), rho0, t);
}

DensityMatrix equilibrium_state_general(const HermitianOperator& h_total,
                                        const DensityMatrix& rho0) {
  return pinching(rho0, eigh(h_total));
}

double effective_dimension_general(const SpectralDecomposition& h_eig, const DensityMatrix& rho0) {
  if (h_eig.dim() != rho0.dim()) {
    throw std::invalid_argument("effective_dimension_general: dimension mismatch");
  }
  const ComplexMatrix& v = h_eig.eigenvectors;
  // Diagonal of V^+ rho V without forming the full product.
  const ComplexMatrix rv = rho0.matrix() * v;
  RealVector diag(v.cols());
  for (Eigen::Index n = 0; n < v.cols(); ++n) diag[n] = v.col(n).dot(rv.col(n)).real();
  double inv = 0.0;
  for (auto [begin, end] : eigenspace_groups(h_eig.eigenvalues)) {
    const double p = diag.segment(static_cast<Eigen::Index>(begin),
                                  static_cast<Eigen::Index>(end - begin))
                         .sum();
    inv += p * p;
  }
  return 1.0 / inv;
}

double effective_dimension_general(const HermitianOperator& h_total, const DensityMatrix& rho0) {
  if (h_total.dim() != rho0.dim()) {
    throw std::invalid_argument("effective_dimension_general: dimension mismatch");
  }
  return effective_dimension_general(eigh(h_total), rho0);
}

double effective_dimension_from_overlaps(const std::vector<double>& pointer_probs,
                                         const std::vector<std::vector<double>>& overlaps) {
  double inv = 0.0;
  for (std::size_t i = 0; i < pointer_probs.size(); ++i) {
    double prod = 1.0;
    for (const auto& per_env : overlaps) {
      if (per_env.size() != pointer_probs.size()) {
        throw std::invalid_argument("effective_dimension_from_overlaps: ragged overlap table");
      }
      prod *= per_env[i];
    }
    inv += pointer_probs[i] * pointer_probs[i] * prod;
  }
  return 1.0 / inv;
}

double effective_dimension_broadcast(const BroadcastingModel& model,
                                     const ConditionalStateSet& set) {
  std::vector<std::vector<double>> overlaps(set.states.size());
  for (std::size_t l = 0; l < set.states.size(); ++l) {
    for (const ConditionalState& s : set.states[l]) overlaps[l].push_back(s.overlap_sum);
  }
  return effective_dimension_from_overlaps(model.pointer_probs(), overlaps);
}

double equilibration_error(std::size_t d_s, double d_eff) {
  if (!(d_eff >= 1.0 - kDeffSlack)) {
    throw std::invalid_argument("equilibration_error: d_eff must be >= 1, got " +
                                std::to_string(d_eff));
  }
  return static_cast<double>(d_s) / (4.0 * std::sqrt(std::max(d_eff, 1.0)));
}

}  // namespace meq
