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

#include "meq/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <random>

#include "meq/ensembles.hpp"
#include "meq/equilibrium.hpp"
#include "meq/experiments.hpp"
#include "meq/io.hpp"
#include "meq/objectivity.hpp"
#include "meq/states.hpp"

namespace meq {

namespace {

constexpr std::size_t kSamples = 200;

struct Checker {
  std::vector<CheckResult> results;

  void run(const std::string& name, const std::function<std::string()>& body) {
    try {
      std::string failure = body();
      results.push_back({name, failure.empty(), failure.empty() ? "ok" : failure});
    } catch (const std::exception& e) {
      results.push_back({name, false, std::string("exception: ") + e.what()});
    }
  }
};

std::string check_records(const std::vector<SampleRecord>& records, std::size_t d_s) {
  for (const SampleRecord& r : records) {
    const double cap = static_cast<double>(d_s * r.d_k);
    if (!(r.e_eq >= 0.0) || !(r.e_obj >= -1e-12) || r.e_obj > static_cast<double>(d_s - 1) + 1e-9 ||
        !(r.d_eff >= 1.0 - 1e-9) || r.d_eff > cap * (1.0 + 1e-9)) {
      return "record out of range at d_k=" + std::to_string(r.d_k) +
             " sample=" + std::to_string(r.sample_index);
    }
  }
  return {};
}

}  // namespace

std::vector<CheckResult> run_selfcheck(std::uint64_t seed, std::size_t threads) {
  Checker c;

  c.run("gue_hermitian", [&] {
    for (std::size_t d : {2, 4, 16}) {
      const HermitianOperator h = sample_gue(d, RngSeed{seed, d});
      if (hermiticity_defect(h.matrix()) > 1e-12) return "non-Hermitian draw at d=" + std::to_string(d);
    }
    return std::string{};
  });

  ExperimentConfig scan;
  scan.kind = ExperimentKind::kEquilibrationScan;
  scan.dims = {2, 4, 8, 16};
  scan.qubit_counts = {1, 2, 3, 4};
  scan.samples = kSamples;
  scan.master_seed = seed;
  scan.threads = threads;
  const ExperimentResult pure = run_experiment(scan);

  c.run("record_ranges_pure", [&] { return check_records(pure.records, 2); });

  c.run("record_ranges_d_s_3", [&] {
    ExperimentConfig cfg = scan;
    cfg.d_s = 3;
    cfg.dims = {4};
    cfg.qubit_counts = {2};
    return check_records(run_experiment(cfg).records, 3);
  });

  c.run("maximally_mixed_exact", [&] {
    ExperimentConfig cfg = scan;
    cfg.initial_state = InitialState::kMaximallyMixed;
    for (const SampleRecord& r : run_experiment(cfg).records) {
      const double expect = 2.0 * static_cast<double>(r.d_k);
      if (std::abs(r.d_eff - expect) > 1e-9 * expect || std::abs(r.e_obj - 1.0) > 1e-9) {
        return "d_eff or F off at d_k=" + std::to_string(r.d_k);
      }
    }
    return std::string{};
  });

  c.run("thermal_zero_matches_pure", [&] {
    ExperimentConfig cfg = scan;
    cfg.kind = ExperimentKind::kThermalScan;
    cfg.dims = {4};
    cfg.qubit_counts = {};
    cfg.nbar_values = {0.0};
    const ExperimentResult th = run_experiment(cfg);
    for (std::size_t s = 0; s < kSamples; ++s) {
      // Pure-scan single-qudit d_k=4 records start after d_k=2.
      const SampleRecord& a = th.records[s];
      const SampleRecord& b = pure.records[kSamples + s];
      if (a.e_eq != b.e_eq || a.e_obj != b.e_obj || a.d_eff != b.d_eff) {
        return "mismatch at sample " + std::to_string(s);
      }
    }
    return std::string{};
  });

  c.run("d_eff_cross_oracle", [&] {
    Engine engine = make_engine(RngSeed{seed, 0xC0});
    for (int inst = 0; inst < 20; ++inst) {
      std::vector<std::vector<HermitianOperator>> hams(2);
      for (auto& row : hams) {
        for (int i = 0; i < 2; ++i) row.push_back(sample_gue(2, engine));
      }
      const BroadcastingModel model(equal_priors(2), hams, {pure_ground(2), pure_ground(2)});
      const double factored = effective_dimension_broadcast(model, conditional_equilibrium_states(model));
      const double global =
          effective_dimension_general(assemble_total_hamiltonian(model), model.initial_state());
      if (std::abs(factored - global) > 1e-9 * global) return "instance " + std::to_string(inst);
    }
    return std::string{};
  });

  c.run("unitary_invariance", [&] {
    Engine engine = make_engine(RngSeed{seed, 0xC1});
    const DensityMatrix rho0 = pure_ground(4);
    for (int inst = 0; inst < 20; ++inst) {
      const HermitianOperator h0 = sample_gue(4, engine);
      const HermitianOperator h1 = sample_gue(4, engine);
      const ComplexMatrix u = sample_haar_unitary(4, engine);
      const auto rot = [&](const ComplexMatrix& m) { return conjugate(u, m); };
      const ConditionalState a0 = conditional_state(h0, rho0);
      const ConditionalState a1 = conditional_state(h1, rho0);
      const DensityMatrix rho0u = DensityMatrix::unchecked(rot(rho0.matrix()));
      const ConditionalState b0 = conditional_state(HermitianOperator::unchecked(rot(h0.matrix())), rho0u);
      const ConditionalState b1 = conditional_state(HermitianOperator::unchecked(rot(h1.matrix())), rho0u);
      if (std::abs(fidelity(a0.factored, a1.factored) - fidelity(b0.factored, b1.factored)) > 1e-9 ||
          std::abs(a0.overlap_sum - b0.overlap_sum) > 1e-9 ||
          std::abs(a1.overlap_sum - b1.overlap_sum) > 1e-9) {
        return "instance " + std::to_string(inst);
      }
    }
    return std::string{};
  });

  c.run("helstrom_zero_plus", [&] {
    ComplexMatrix plus = ComplexMatrix::Constant(2, 2, 0.5);
    const DiscriminationResult r =
        helstrom_projectors(0.5, pure_ground(2), 0.5, DensityMatrix(plus));
    const double expect = 0.5 + 0.5 / std::sqrt(2.0);
    if (std::abs(r.success_prob - expect) > 1e-9) return std::string("success probability off");
    return std::string{};
  });

  c.run("error_bound", [&] {
    Engine engine = make_engine(RngSeed{seed, 0xC2});
    for (int inst = 0; inst < 5; ++inst) {
      const BroadcastingModel model(equal_priors(2), {{sample_gue(2, engine), sample_gue(2, engine)}},
                                    {pure_ground(2)});
      const auto grid = make_time_grid(eigh(assemble_total_hamiltonian(model)), 1000,
                                       seed + static_cast<std::uint64_t>(inst));
      const ErrorBoundReport rep = verify_error_bound(model, ObserverGrouping::singletons(1), 0, grid);
      if (!rep.passed) return "instance " + std::to_string(inst) + " exceeds the bound";
    }
    return std::string{};
  });

  c.run("aggregate_permutation", [&] {
    std::vector<SampleRecord> shuffled = pure.records;
    std::mt19937_64 g(seed);
    std::shuffle(shuffled.begin(), shuffled.end(), g);
    if (aggregates_csv(aggregate(shuffled)) != aggregates_csv(pure.aggregates)) {
      return std::string("aggregates depend on record order");
    }
    return std::string{};
  });

  c.run("thread_determinism", [&] {
    ExperimentConfig a = scan;
    a.threads = 1;
    ExperimentConfig b = scan;
    b.threads = 3;
    if (records_csv(run_experiment(a).records) != records_csv(run_experiment(b).records)) {
      return std::string("records differ between 1 and 3 threads");
    }
    return std::string{};
  });

  return c.results;
}

}  // namespace meq
