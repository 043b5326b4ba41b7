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

#include "meq/objectivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "meq/ensembles.hpp"

namespace meq {

namespace {

constexpr std::size_t kMinTimeSamples = 1000;
constexpr double kMinSpanFactor = 100.0;

void check_priors(std::span<const double> q) {
  double total = 0.0;
  for (double p : q) {
    if (!(p >= 0.0)) throw std::invalid_argument("priors must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("priors sum to " + std::to_string(total) + ", expected 1");
  }
}

// tr(a b) for square matrices of equal size.
Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.transpose().cwiseProduct(b).sum();
}

ComplexMatrix projector_onto(const ComplexMatrix& v, const std::vector<Eigen::Index>& cols) {
  ComplexMatrix sub(v.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = v.col(cols[c]);
  return sub * sub.adjoint();
}

void check_projector_set(std::span<const HermitianOperator> projectors) {
  if (projectors.empty()) throw std::invalid_argument("projector set is empty");
  const auto n = static_cast<Eigen::Index>(projectors.front().dim());
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (std::size_t a = 0; a < projectors.size(); ++a) {
    const ComplexMatrix& p = projectors[a].matrix();
    if (p.rows() != n) throw std::invalid_argument("projector dimensions differ");
    if (max_abs_entry(p * p - p) > kProjectorTol) {
      throw std::invalid_argument("operator " + std::to_string(a) + " is not a projector");
    }
    for (std::size_t b = a + 1; b < projectors.size(); ++b) {
      if (max_abs_entry(p * projectors[b].matrix()) > kProjectorTol) {
        throw std::invalid_argument("projectors " + std::to_string(a) + " and " +
                                    std::to_string(b) + " are not orthogonal");
      }
    }
    sum += p;
  }
  if (max_abs_entry(sum - ComplexMatrix::Identity(n, n)) > kProjectorTol) {
    throw std::invalid_argument("incomplete projector set: projectors do not sum to identity");
  }
}

template <typename State, typename Fid>
double objectivity_error_impl(std::span<const double> q, std::span<const State> states, Fid fid) {
  if (q.size() != states.size()) {
    throw std::invalid_argument("objectivity_error: " + std::to_string(q.size()) + " priors for " +
                                std::to_string(states.size()) + " states");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      // F is symmetric, so the (i, j) and (j, i) terms are equal.
      total += 2.0 * std::sqrt(q[i] * q[j]) * fid(states[i], states[j]);
    }
  }
  return total;
}

}  // namespace

DiscriminationResult helstrom_projectors(double q0, const DensityMatrix& rho0, double q1,
                                         const DensityMatrix& rho1, double tol) {
  const double priors[] = {q0, q1};
  check_priors(priors);
  if (rho0.dim() != rho1.dim()) {
    throw std::invalid_argument("helstrom_projectors: dimension mismatch");
  }
  const SpectralDecomposition sd =
      eigh(HermitianOperator::unchecked(q0 * rho0.matrix() - q1 * rho1.matrix()));

  std::vector<Eigen::Index> outcome0;
  bool tie_to_zero = true;
  for (Eigen::Index k = 0; k < sd.eigenvalues.size(); ++k) {
    const double lambda = sd.eigenvalues[k];
    if (lambda > tol) {
      outcome0.push_back(k);
    } else if (lambda >= -tol) {
      if (tie_to_zero) outcome0.push_back(k);
      tie_to_zero = !tie_to_zero;
    }
  }
  const auto n = static_cast<Eigen::Index>(rho0.dim());
  const ComplexMatrix pi0 = projector_onto(sd.eigenvectors, outcome0);
  const ComplexMatrix pi1 = ComplexMatrix::Identity(n, n) - pi0;

  DiscriminationResult out;
  out.priors = {q0, q1};
  out.success_prob = q0 * trace_of_product(pi0, rho0.matrix()).real() +
                     q1 * trace_of_product(pi1, rho1.matrix()).real();
  out.projectors.push_back(HermitianOperator::unchecked(pi0));
  out.projectors.push_back(HermitianOperator::unchecked(pi1));
  return out;
}

double success_probability(std::span<const double> q, std::span<const DensityMatrix> states,
                           std::span<const HermitianOperator> projectors) {
  if (q.size() != states.size() || q.size() != projectors.size()) {
    throw std::invalid_argument("success_probability: mismatched lengths");
  }
  check_projector_set(projectors);
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (states[i].dim() != projectors[i].dim()) {
      throw std::invalid_argument("success_probability: state/projector dimension mismatch");
    }
    total += q[i] * trace_of_product(states[i].matrix(), projectors[i].matrix()).real();
  }
  return total;
}

Povm::Povm(std::vector<ComplexMatrix> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw std::invalid_argument("Povm: no elements");
  const Eigen::Index n = elements_.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (std::size_t a = 0; a < elements_.size(); ++a) {
    const ComplexMatrix& m = elements_[a];
    if (m.rows() != n || m.cols() != n) throw std::invalid_argument("Povm: element dimensions differ");
    if (hermiticity_defect(m) > kProjectorTol) {
      throw std::invalid_argument("Povm: element " + std::to_string(a) + " is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kProjectorTol) {
      throw std::invalid_argument("Povm: element " + std::to_string(a) + " is not positive");
    }
    sum += m;
  }
  if (max_abs_entry(sum - ComplexMatrix::Identity(n, n)) > kProjectorTol) {
    throw std::invalid_argument("incomplete POVM: elements do not sum to identity");
  }
}

double distinguishability(const Povm& measurement, const DensityMatrix& rho1,
                          const DensityMatrix& rho2) {
  if (rho1.dim() != measurement.dim() || rho2.dim() != measurement.dim()) {
    throw std::invalid_argument("distinguishability: dimension mismatch");
  }
  const ComplexMatrix diff = rho1.matrix() - rho2.matrix();
  double total = 0.0;
  for (const ComplexMatrix& m : measurement.elements()) {
    total += std::abs(trace_of_product(m, diff).real());
  }
  return 0.5 * total;
}

double distinguishability(std::span<const HermitianOperator> outcome_ops,
                          const DensityMatrix& rho1, const DensityMatrix& rho2) {
  std::vector<ComplexMatrix> elements;
  for (const HermitianOperator& op : outcome_ops) elements.push_back(op.matrix());
  return distinguishability(Povm(std::move(elements)), rho1, rho2);
}

std::vector<ComplexMatrix> ObjectifyingObservable::outcome_operators() const {
  std::vector<ComplexMatrix> ops;
  ops.reserve(projectors.size());
  for (const HermitianOperator& p : projectors) {
    ops.push_back(embed_operator(p.matrix(), layout, factors));
  }
  return ops;
}

ComplexMatrix ObjectifyingObservable::observable() const {
  const std::vector<ComplexMatrix> ops = outcome_operators();
  ComplexMatrix total = ComplexMatrix::Zero(ops.front().rows(), ops.front().cols());
  for (std::size_t i = 0; i < ops.size(); ++i) total += outcome_labels[i] * ops[i];
  return total;
}

ObjectifyingObservable make_objectifying_observable(std::size_t observer_index,
                                                    std::vector<HermitianOperator> projectors,
                                                    std::vector<std::size_t> layout,
                                                    std::vector<std::size_t> factors) {
  check_projector_set(projectors);
  if (std::find(factors.begin(), factors.end(), std::size_t{0}) != factors.end()) {
    throw std::invalid_argument("objectifying observable cannot act on the system factor");
  }
  ObjectifyingObservable obs;
  obs.observer_index = observer_index;
  obs.outcome_labels.resize(projectors.size());
  std::iota(obs.outcome_labels.begin(), obs.outcome_labels.end(), 0.0);
  obs.projectors = std::move(projectors);
  obs.layout = std::move(layout);
  obs.factors = std::move(factors);
  return obs;
}

SbsCandidate candidate_sbs(std::span<const double> q,
                           const std::vector<std::vector<HermitianOperator>>& per_observer_projectors) {
  check_priors(q);
  SbsCandidate out;
  out.pointer_probs.assign(q.begin(), q.end());
  for (std::size_t k = 0; k < per_observer_projectors.size(); ++k) {
    const auto& projectors = per_observer_projectors[k];
    if (projectors.size() != q.size()) {
      throw std::invalid_argument("candidate_sbs: observer " + std::to_string(k) + " has " +
                                  std::to_string(projectors.size()) + " projectors for " +
                                  std::to_string(q.size()) + " outcomes");
    }
    std::vector<DensityMatrix> branches;
    for (std::size_t i = 0; i < projectors.size(); ++i) {
      const double rank = projectors[i].matrix().trace().real();
      if (rank < 0.5 && q[i] == 0.0) {
        // Zero-weight branch; assemble() skips it.
        const auto d = projectors[i].matrix().rows();
        branches.push_back(DensityMatrix::unchecked(ComplexMatrix::Identity(d, d) / static_cast<double>(d)));
        continue;
      }
      if (rank < 0.5) {
        throw std::domain_error("candidate_sbs: projector for observer " + std::to_string(k) +
                                ", outcome " + std::to_string(i) +
                                " has rank zero (empty outcome subspace)");
      }
      branches.push_back(DensityMatrix::unchecked(projectors[i].matrix() / rank));
    }
    out.branch_states.push_back(std::move(branches));
  }
  return out;
}

DensityMatrix SbsCandidate::assemble(
    std::span<const std::size_t> layout,
    const std::vector<std::vector<std::size_t>>& observer_factors) const {
  if (observer_factors.size() != branch_states.size()) {
    throw std::invalid_argument("SbsCandidate::assemble: observer count mismatch");
  }
  if (layout.empty() || layout.front() != pointer_probs.size()) {
    throw std::invalid_argument("SbsCandidate::assemble: layout must start with the system");
  }
  const std::size_t total =
      std::accumulate(layout.begin(), layout.end(), std::size_t{1}, std::multiplies<>());
  const auto n = static_cast<Eigen::Index>(total);
  const auto d_s = static_cast<Eigen::Index>(layout.front());
  const std::size_t system_factor[] = {0};
  ComplexMatrix rho = ComplexMatrix::Zero(n, n);
  for (std::size_t i = 0; i < pointer_probs.size(); ++i) {
    if (pointer_probs[i] == 0.0) continue;
    ComplexMatrix pointer = ComplexMatrix::Zero(d_s, d_s);
    pointer(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    // Embedded operators on disjoint factors commute and multiply to their
    // tensor product.
    ComplexMatrix branch = embed_operator(pointer, layout, system_factor);
    for (std::size_t k = 0; k < branch_states.size(); ++k) {
      branch = branch * embed_operator(branch_states[k][i].matrix(), layout, observer_factors[k]);
    }
    rho += pointer_probs[i] * branch;
  }
  return DensityMatrix::unchecked(std::move(rho));
}

double objectivity_error(std::span<const double> q, std::span<const DensityMatrix> states) {
  return objectivity_error_impl(q, states, [](const DensityMatrix& a, const DensityMatrix& b) {
    return fidelity(a, b);
  });
}

double objectivity_error(std::span<const double> q, std::span<const FactoredState> states) {
  return objectivity_error_impl(q, states, [](const FactoredState& a, const FactoredState& b) {
    return fidelity(a, b);
  });
}

double min_energy_gap(const SpectralDecomposition& h_eig) {
  const auto groups = eigenspace_groups(h_eig.eigenvalues);
  double gap = 0.0;
  for (std::size_t g = 1; g < groups.size(); ++g) {
    const double d = h_eig.eigenvalues[static_cast<Eigen::Index>(groups[g].first)] -
                     h_eig.eigenvalues[static_cast<Eigen::Index>(groups[g - 1].second - 1)];
    gap = g == 1 ? d : std::min(gap, d);
  }
  return gap;
}

std::vector<double> make_time_grid(const SpectralDecomposition& h_eig, std::size_t samples,
                                   std::uint64_t seed, double span_factor) {
  if (samples == 0) throw std::invalid_argument("make_time_grid: need at least one sample");
  const double gap = min_energy_gap(h_eig);
  const double span = gap > 0.0 ? span_factor / gap : span_factor;
  Engine engine = make_engine(RngSeed{seed, 0});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> grid(samples);
  const double width = span / static_cast<double>(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    grid[s] = width * (static_cast<double>(s) + unit(engine));
  }
  return grid;
}

ErrorBoundReport verify_error_bound_general(const HermitianOperator& h_total,
                                            const DensityMatrix& rho0,
                                            std::span<const std::size_t> layout,
                                            const ObserverGrouping& grouping, std::size_t k,
                                            std::span<const double> time_grid) {
  if (layout.size() < 2 || layout.front() != 2) {
    throw std::invalid_argument("verify_error_bound: requires a qubit system (d_S = 2)");
  }
  if (grouping.num_sub_envs() + 1 != layout.size()) {
    throw std::invalid_argument("verify_error_bound: grouping does not match layout");
  }
  if (k >= grouping.num_observers()) {
    throw std::invalid_argument("verify_error_bound: observer index out of range");
  }
  if (h_total.dim() != rho0.dim()) {
    throw std::invalid_argument("verify_error_bound: dimension mismatch");
  }

  const SpectralDecomposition h_eig = eigh(h_total);
  ErrorBoundReport report;
  report.min_gap = min_energy_gap(h_eig);
  if (time_grid.size() < kMinTimeSamples) {
    throw std::invalid_argument("verify_error_bound: degenerate time grid (" +
                                std::to_string(time_grid.size()) + " samples, need >= " +
                                std::to_string(kMinTimeSamples) + ")");
  }
  const auto [tmin, tmax] = std::minmax_element(time_grid.begin(), time_grid.end());
  report.time_span = *tmax - *tmin;
  report.time_samples = time_grid.size();
  if (report.min_gap > 0.0 && report.time_span < kMinSpanFactor / report.min_gap) {
    throw std::invalid_argument("verify_error_bound: degenerate time grid (span " +
                                std::to_string(report.time_span) + " < 100 / min gap)");
  }

  const std::size_t d_s = layout.front();
  const std::vector<std::size_t> env_dims(layout.begin() + 1, layout.end());
  const DensityMatrix rho_eq = pinching(rho0, h_eig);

  // Pointer-basis blocks of the equilibrium state.
  const auto d_env = static_cast<Eigen::Index>(rho0.dim() / d_s);
  std::vector<DensityMatrix> branches;
  for (std::size_t i = 0; i < d_s; ++i) {
    const auto off = static_cast<Eigen::Index>(i) * d_env;
    const ComplexMatrix block = rho_eq.matrix().block(off, off, d_env, d_env);
    const double weight = block.trace().real();
    report.q.push_back(weight);
    branches.push_back(weight > 0.0
                           ? DensityMatrix::unchecked(block / weight)
                           : DensityMatrix::unchecked(ComplexMatrix::Identity(d_env, d_env) /
                                                      static_cast<double>(d_env)));
  }
  // Renormalize away rounding so the priors validate.
  const double qsum = std::accumulate(report.q.begin(), report.q.end(), 0.0);
  for (double& w : report.q) w = std::max(w, 0.0) / qsum;

  // Helstrom projectors for every observer; the SBS candidate needs them all.
  std::vector<std::vector<HermitianOperator>> all_projectors;
  std::vector<std::vector<std::size_t>> observer_factors;
  std::vector<DensityMatrix> observer_states;
  for (std::size_t kk = 0; kk < grouping.num_observers(); ++kk) {
    std::vector<DensityMatrix> reduced;
    for (const DensityMatrix& b : branches) {
      reduced.push_back(partial_trace(b, env_dims, grouping.group(kk)));
    }
    DiscriminationResult dr =
        helstrom_projectors(report.q[0], reduced[0], report.q[1], reduced[1]);
    if (kk == k) {
      report.success_prob = dr.success_prob;
      observer_states = reduced;
    }
    all_projectors.push_back(std::move(dr.projectors));
    std::vector<std::size_t> factors;
    for (std::size_t l : grouping.group(kk)) factors.push_back(l + 1);
    observer_factors.push_back(std::move(factors));
  }

  report.e_obj = objectivity_error(report.q, std::span<const DensityMatrix>(observer_states));
  report.d_eff = effective_dimension_general(h_eig, rho0);
  report.e_eq = equilibration_error(d_s, report.d_eff);
  report.bound = report.e_obj + report.e_eq;

  const SbsCandidate sbs = candidate_sbs(report.q, all_projectors);
  const DensityMatrix rho_sbs = sbs.assemble(layout, observer_factors);
  const ObjectifyingObservable observable = make_objectifying_observable(
      k, all_projectors[k], std::vector<std::size_t>(layout.begin(), layout.end()),
      observer_factors[k]);
  const Povm povm(observable.outcome_operators());

  report.equilibrium_distinguishability = distinguishability(povm, rho_eq, rho_sbs);

  // tr(O rho(t)) in the energy eigenbasis: with rho0' = V^+ rho0 V and
  // O' = V^+ O V, tr(O rho(t)) = sum_mn O'_nm rho0'_mn e^{-i(E_m - E_n)t}.
  const ComplexMatrix& v = h_eig.eigenvectors;
  const ComplexMatrix rho0_e = v.adjoint() * rho0.matrix() * v;
  std::vector<ComplexMatrix> weights;
  std::vector<double> sbs_expect, eq_expect;
  for (const ComplexMatrix& o : povm.elements()) {
    const ComplexMatrix o_e = v.adjoint() * o * v;
    weights.push_back(o_e.transpose().cwiseProduct(rho0_e));
    sbs_expect.push_back(trace_of_product(o, rho_sbs.matrix()).real());
    eq_expect.push_back(trace_of_product(o, rho_eq.matrix()).real());
  }
  const Eigen::Index dim = v.cols();
  ComplexVector phase(dim);
  double sum_sbs = 0.0, sum_eq = 0.0;
  for (double t : time_grid) {
    for (Eigen::Index m = 0; m < dim; ++m) phase[m] = std::polar(1.0, -h_eig.eigenvalues[m] * t);
    double d_sbs = 0.0, d_eq = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const double expect = (phase.transpose() * weights[i] * phase.conjugate()).value().real();
      d_sbs += std::abs(expect - sbs_expect[i]);
      d_eq += std::abs(expect - eq_expect[i]);
    }
    sum_sbs += 0.5 * d_sbs;
    sum_eq += 0.5 * d_eq;
  }
  const auto count = static_cast<double>(time_grid.size());
  report.empirical_average = sum_sbs / count;
  report.equilibration_average = sum_eq / count;
  report.margin = report.bound - report.empirical_average;
  report.passed = report.empirical_average <= report.bound + kBoundSlack;
  return report;
}

ErrorBoundReport verify_error_bound(const BroadcastingModel& model,
                                    const ObserverGrouping& grouping, std::size_t k,
                                    std::span<const double> time_grid, std::size_t cap) {
  const HermitianOperator h = assemble_total_hamiltonian(model, cap);
  const std::vector<std::size_t> layout = model.layout();
  return verify_error_bound_general(h, model.initial_state(), layout, grouping, k, time_grid);
}

}  // namespace meq
