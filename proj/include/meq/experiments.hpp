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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "meq/ensembles.hpp"
#include "meq/qmatrix.hpp"

namespace meq {

enum class ExperimentKind { kEquilibrationScan, kFidelityScan, kThermalScan, kBoundVerify, kPorterThomas };
enum class InitialState { kPure, kMaximallyMixed };
enum class Scenario { kSingleQudit, kNQubits };

std::string_view to_string(ExperimentKind kind);
std::string_view to_string(InitialState state);
std::string_view to_string(Scenario scenario);
/// Inverse of to_string; std::nullopt for unknown names.
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);
std::optional<InitialState> parse_initial_state(std::string_view name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kEquilibrationScan;
  std::size_t d_s = 2;
  /// Single-qudit observer dimensions d_k.
  std::vector<std::size_t> dims;
  /// n for coarse-grained n-qubit observers (d_k = 2^n).
  std::vector<std::size_t> qubit_counts;
  std::vector<double> nbar_values;
  std::size_t samples = 10000;
  std::uint64_t master_seed = 0;
  std::string output_path;
  /// Initial sub-environment state for the equilibration and fidelity scans.
  InitialState initial_state = InitialState::kPure;
  /// Time points per bound_verify instance.
  std::size_t time_samples = 1000;
  /// Worker threads; 0 defers to MEQ_THREADS, then hardware concurrency.
  std::size_t threads = 0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct SampleRecord {
  std::size_t sample_index = 0;
  Scenario scenario = Scenario::kSingleQudit;
  std::size_t d_k = 0;
  std::optional<std::size_t> n;
  std::optional<double> nbar;
  double e_eq = 0.0;
  double e_obj = 0.0;
  double d_eff = 0.0;
};

struct AggregateRow {
  /// "<metric>:<scenario>:d_k=<d>" with ":nbar=<x>" appended for thermal rows.
  std::string group_key;
  double mean = 0.0;
  /// Unbiased sample variance; 0 when count is 1. For log2_mean_e_obj rows,
  /// the delta-method variance var / (mean ln 2)^2.
  double variance = 0.0;
  std::size_t count = 0;

  double standard_error() const;
};

struct BoundRecord {
  std::size_t sample_index = 0;
  std::size_t d_k = 0;
  double empirical_average = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool passed = false;
};

struct ExperimentResult {
  std::vector<SampleRecord> records;
  std::vector<AggregateRow> aggregates;
  /// Filled by bound_verify only.
  std::vector<BoundRecord> bounds;
};

/// Seed of one sample. The stream index encodes the scenario, d_k (or n)
/// and sample index, but not nbar, so every nbar reuses the same draws.
RngSeed sample_seed(std::uint64_t master_seed, Scenario scenario, std::size_t size,
                    std::size_t sample_index);

/// One single-qudit sample: d_S GUE conditional Hamiltonians of dimension
/// d_k, drawn in order i = 0..d_S-1 from one engine, acting on `rho0`.
SampleRecord sample_single_qudit(std::size_t d_s, const DensityMatrix& rho0, RngSeed seed);

/// One n-qubit sample: per qubit l = 0..n-1, d_S conditional 2x2 GUE
/// Hamiltonians drawn from one engine. Overlap sums and fidelities combine
/// multiplicatively, so the 2^n space is never built.
SampleRecord sample_n_qubits(std::size_t d_s, std::size_t n, const DensityMatrix& qubit_rho0,
                             RngSeed seed);

ExperimentResult run_equilibration_scan(const ExperimentConfig& config);
/// Requires d_S = 2.
ExperimentResult run_fidelity_scan(const ExperimentConfig& config);
/// Single-qudit grid over (dims, nbar_values); requires d_S = 2.
ExperimentResult run_thermal_scan(const ExperimentConfig& config);
/// Requires d_S = 2; each instance has one sub-environment of dimension d_k.
ExperimentResult run_bound_verify(const ExperimentConfig& config);
/// Aggregates only: the Monte Carlo estimate, the closed form, and GUE
/// eigenvector overlap moments for every d_k in dims.
ExperimentResult run_porter_thomas(const ExperimentConfig& config);
/// Dispatches on config.kind after validation.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Mean and unbiased variance of `values`. The values are sorted before
/// summation, so any permutation yields bit-identical output. Throws
/// std::invalid_argument on empty input.
AggregateRow summarize(std::string group_key, std::vector<double> values);

/// e_eq, e_obj and d_eff rows per (scenario, d_k, nbar) group, plus
/// log2_mean_e_obj rows for n-qubit groups. Rows are ordered by scenario,
/// d_k and nbar, then metric name.
/// Throws std::invalid_argument on empty input.
std::vector<AggregateRow> aggregate(std::span<const SampleRecord> records);

/// <sqrt y>^4 <y> over the given samples. Throws on empty input.
double porter_thomas_statistic(std::span<const double> y);
/// pi^2 / 16.
double porter_thomas_closed_form();

struct PorterThomasEstimate {
  double estimate = 0.0;
  double closed_form = 0.0;
};

/// Draws `samples` values from Exp(1). Throws if samples == 0.
PorterThomasEstimate porter_thomas_limit(std::size_t samples, std::uint64_t seed);

struct OverlapMoments {
  double mean_y = 0.0;
  double mean_sqrt_y = 0.0;
  std::size_t count = 0;
};

/// y = d |<E_n|0>|^2 pooled over all eigenvectors of `samples` GUE draws.
OverlapMoments gue_overlap_moments(std::size_t dim, std::size_t samples, std::uint64_t seed);

/// Requested count if nonzero, else MEQ_THREADS if set and positive, else
/// hardware concurrency (at least 1).
std::size_t resolve_thread_count(std::size_t requested);

}  // namespace meq
