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

#include "meq/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "meq/equilibrium.hpp"
#include "meq/objectivity.hpp"
#include "meq/states.hpp"

namespace meq {

namespace {

constexpr std::uint64_t kTagSingleQudit = 1;
constexpr std::uint64_t kTagNQubits = 2;
constexpr std::uint64_t kTagPorterThomas = 4;
constexpr std::uint64_t kTagOverlapMoments = 5;
constexpr std::size_t kMaxSampleIndex = std::size_t{1} << 32;
constexpr std::size_t kMaxSize = std::size_t{1} << 24;
constexpr std::size_t kMaxQubits = 30;

void fail(const std::string& field, const std::string& what) {
  throw std::invalid_argument(field + ": " + what);
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

DensityMatrix scan_initial_state(InitialState s, std::size_t dim) {
  return s == InitialState::kPure ? pure_ground(dim) : maximally_mixed(dim);
}

// Runs body(i) for i in [0, count) on `threads` workers. Every index writes
// its own output slot, so scheduling cannot affect results.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(count);
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

struct Task {
  Scenario scenario;
  std::size_t size;  // d_k for single qudits, n for n qubits
  std::optional<double> nbar;
  std::size_t sample_index;
};

std::vector<SampleRecord> run_tasks(const std::vector<Task>& tasks, const ExperimentConfig& config,
                                    const std::function<SampleRecord(const Task&)>& run) {
  std::vector<SampleRecord> records(tasks.size());
  parallel_for(tasks.size(), resolve_thread_count(config.threads),
               [&](std::size_t t) { records[t] = run(tasks[t]); });
  return records;
}

std::vector<Task> scan_tasks(const ExperimentConfig& config) {
  std::vector<Task> tasks;
  for (std::size_t d : config.dims) {
    for (std::size_t s = 0; s < config.samples; ++s) {
      tasks.push_back({Scenario::kSingleQudit, d, std::nullopt, s});
    }
  }
  for (std::size_t n : config.qubit_counts) {
    for (std::size_t s = 0; s < config.samples; ++s) {
      tasks.push_back({Scenario::kNQubits, n, std::nullopt, s});
    }
  }
  return tasks;
}

ExperimentResult run_scan(const ExperimentConfig& config) {
  std::vector<DensityMatrix> qudit_states;
  for (std::size_t d : config.dims) qudit_states.push_back(scan_initial_state(config.initial_state, d));
  const DensityMatrix qubit_state = scan_initial_state(config.initial_state, 2);
  std::map<std::size_t, const DensityMatrix*> by_dim;
  for (std::size_t k = 0; k < config.dims.size(); ++k) by_dim[config.dims[k]] = &qudit_states[k];

  ExperimentResult out;
  out.records = run_tasks(scan_tasks(config), config, [&](const Task& t) {
    const RngSeed seed = sample_seed(config.master_seed, t.scenario, t.size, t.sample_index);
    SampleRecord r = t.scenario == Scenario::kSingleQudit
                         ? sample_single_qudit(config.d_s, *by_dim.at(t.size), seed)
                         : sample_n_qubits(config.d_s, t.size, qubit_state, seed);
    r.sample_index = t.sample_index;
    return r;
  });
  out.aggregates = aggregate(out.records);
  return out;
}

std::tuple<int, std::size_t, double> group_order(const SampleRecord& r) {
  return {static_cast<int>(r.scenario), r.d_k, r.nbar.value_or(-1.0)};
}

std::string group_suffix(const SampleRecord& r) {
  std::string key = std::string(to_string(r.scenario)) + ":d_k=" + std::to_string(r.d_k);
  if (r.nbar) key += ":nbar=" + format_double(*r.nbar);
  return key;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kEquilibrationScan: return "equilibration_scan";
    case ExperimentKind::kFidelityScan: return "fidelity_scan";
    case ExperimentKind::kThermalScan: return "thermal_scan";
    case ExperimentKind::kBoundVerify: return "bound_verify";
    case ExperimentKind::kPorterThomas: return "porter_thomas";
  }
  return "unknown";
}

std::string_view to_string(InitialState state) {
  return state == InitialState::kPure ? "pure" : "maximally_mixed";
}

std::string_view to_string(Scenario scenario) {
  return scenario == Scenario::kSingleQudit ? "single_qudit" : "n_qubits";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) {
  for (ExperimentKind k : {ExperimentKind::kEquilibrationScan, ExperimentKind::kFidelityScan,
                           ExperimentKind::kThermalScan, ExperimentKind::kBoundVerify,
                           ExperimentKind::kPorterThomas}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::optional<InitialState> parse_initial_state(std::string_view name) {
  if (name == "pure") return InitialState::kPure;
  if (name == "maximally_mixed") return InitialState::kMaximallyMixed;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (samples < 1) fail("samples", "must be >= 1");
  if (samples > kMaxSampleIndex) fail("samples", "must be < 2^32");
  if (d_s < 2) fail("d_S", "must be >= 2");
  for (std::size_t d : dims) {
    if (d < 2) fail("dims", "entries must be >= 2, got " + std::to_string(d));
    if (d >= kMaxSize) fail("dims", "entries must be < 2^24");
  }
  for (std::size_t n : qubit_counts) {
    if (n < 1 || n > kMaxQubits) fail("qubit_counts", "entries must lie in [1, 30]");
  }
  for (double nb : nbar_values) {
    if (!std::isfinite(nb) || nb < 0.0) fail("nbar_values", "entries must be finite and >= 0");
  }
  const bool two_level = kind == ExperimentKind::kFidelityScan ||
                         kind == ExperimentKind::kThermalScan ||
                         kind == ExperimentKind::kBoundVerify;
  if (two_level && d_s != 2) fail("d_S", std::string(to_string(kind)) + " requires d_S = 2");
  switch (kind) {
    case ExperimentKind::kEquilibrationScan:
    case ExperimentKind::kFidelityScan:
      if (dims.empty() && qubit_counts.empty()) fail("dims", "dims or qubit_counts must be nonempty");
      break;
    case ExperimentKind::kThermalScan:
      if (dims.empty()) fail("dims", "thermal_scan needs at least one dimension");
      if (nbar_values.empty()) fail("nbar_values", "thermal_scan needs at least one value");
      if (!qubit_counts.empty()) fail("qubit_counts", "thermal_scan is single-qudit only");
      break;
    case ExperimentKind::kBoundVerify:
      if (dims.empty()) fail("dims", "bound_verify needs at least one dimension");
      for (std::size_t d : dims) {
        if (d * d_s > kDefaultDimensionCap) fail("dims", "d_S * d_k exceeds the dimension cap 1024");
      }
      if (time_samples < 1000) fail("time_samples", "bound_verify needs >= 1000 time samples");
      break;
    case ExperimentKind::kPorterThomas:
      break;
  }
}

double AggregateRow::standard_error() const {
  return count > 0 ? std::sqrt(variance / static_cast<double>(count)) : 0.0;
}

RngSeed sample_seed(std::uint64_t master_seed, Scenario scenario, std::size_t size,
                    std::size_t sample_index) {
  if (size >= kMaxSize || sample_index >= kMaxSampleIndex) {
    throw std::invalid_argument("sample_seed: size or sample index out of range");
  }
  const std::uint64_t tag = scenario == Scenario::kSingleQudit ? kTagSingleQudit : kTagNQubits;
  return RngSeed{master_seed, (tag << 56) | (static_cast<std::uint64_t>(size) << 32) |
                                  static_cast<std::uint64_t>(sample_index)};
}

SampleRecord sample_single_qudit(std::size_t d_s, const DensityMatrix& rho0, RngSeed seed) {
  Engine engine = make_engine(seed);
  const std::vector<double> p = equal_priors(d_s);
  std::vector<double> overlaps;
  std::vector<FactoredState> states;
  for (std::size_t i = 0; i < d_s; ++i) {
    ConditionalState cs = conditional_state(sample_gue(rho0.dim(), engine), rho0);
    overlaps.push_back(cs.overlap_sum);
    states.push_back(std::move(cs.factored));
  }
  SampleRecord r;
  r.scenario = Scenario::kSingleQudit;
  r.d_k = rho0.dim();
  r.d_eff = effective_dimension_from_overlaps(p, {overlaps});
  r.e_eq = equilibration_error(d_s, r.d_eff);
  r.e_obj = objectivity_error(p, std::span<const FactoredState>(states));
  return r;
}

SampleRecord sample_n_qubits(std::size_t d_s, std::size_t n, const DensityMatrix& qubit_rho0,
                             RngSeed seed) {
  if (n < 1) throw std::invalid_argument("sample_n_qubits: n must be >= 1");
  if (qubit_rho0.dim() != 2) throw std::invalid_argument("sample_n_qubits: qubit state required");
  Engine engine = make_engine(seed);
  const std::vector<double> p = equal_priors(d_s);
  std::vector<std::vector<double>> overlaps(n, std::vector<double>(d_s));
  // pair_fidelity[i][j] accumulates prod_l F(rho_l^(i), rho_l^(j)).
  std::vector<std::vector<double>> pair_fidelity(d_s, std::vector<double>(d_s, 1.0));
  for (std::size_t l = 0; l < n; ++l) {
    std::vector<FactoredState> states;
    for (std::size_t i = 0; i < d_s; ++i) {
      ConditionalState cs = conditional_state(sample_gue(2, engine), qubit_rho0);
      overlaps[l][i] = cs.overlap_sum;
      states.push_back(std::move(cs.factored));
    }
    for (std::size_t i = 0; i < d_s; ++i) {
      for (std::size_t j = i + 1; j < d_s; ++j) pair_fidelity[i][j] *= fidelity(states[i], states[j]);
    }
  }
  SampleRecord r;
  r.scenario = Scenario::kNQubits;
  r.n = n;
  r.d_k = std::size_t{1} << n;
  r.d_eff = effective_dimension_from_overlaps(p, overlaps);
  r.e_eq = equilibration_error(d_s, r.d_eff);
  for (std::size_t i = 0; i < d_s; ++i) {
    for (std::size_t j = i + 1; j < d_s; ++j) {
      r.e_obj += 2.0 * std::sqrt(p[i] * p[j]) * pair_fidelity[i][j];
    }
  }
  return r;
}

ExperimentResult run_equilibration_scan(const ExperimentConfig& config) {
  config.validate();
  return run_scan(config);
}

ExperimentResult run_fidelity_scan(const ExperimentConfig& config) {
  config.validate();
  return run_scan(config);
}

ExperimentResult run_thermal_scan(const ExperimentConfig& config) {
  config.validate();
  std::vector<Task> tasks;
  std::map<std::pair<std::size_t, double>, DensityMatrix> initial;
  for (std::size_t d : config.dims) {
    for (double nb : config.nbar_values) {
      initial.emplace(std::make_pair(d, nb), thermal_state({nb, d}));
      for (std::size_t s = 0; s < config.samples; ++s) {
        tasks.push_back({Scenario::kSingleQudit, d, nb, s});
      }
    }
  }
  ExperimentResult out;
  out.records = run_tasks(tasks, config, [&](const Task& t) {
    const RngSeed seed = sample_seed(config.master_seed, t.scenario, t.size, t.sample_index);
    SampleRecord r = sample_single_qudit(config.d_s, initial.at({t.size, *t.nbar}), seed);
    r.sample_index = t.sample_index;
    r.nbar = t.nbar;
    return r;
  });
  out.aggregates = aggregate(out.records);
  return out;
}

ExperimentResult run_bound_verify(const ExperimentConfig& config) {
  config.validate();
  std::vector<Task> tasks;
  for (std::size_t d : config.dims) {
    for (std::size_t s = 0; s < config.samples; ++s) {
      tasks.push_back({Scenario::kSingleQudit, d, std::nullopt, s});
    }
  }
  ExperimentResult out;
  out.records.resize(tasks.size());
  out.bounds.resize(tasks.size());
  parallel_for(tasks.size(), resolve_thread_count(config.threads), [&](std::size_t t) {
    const Task& task = tasks[t];
    const RngSeed seed =
        sample_seed(config.master_seed, task.scenario, task.size, task.sample_index);
    Engine engine = make_engine(seed);
    std::vector<HermitianOperator> hams;
    for (std::size_t i = 0; i < config.d_s; ++i) hams.push_back(sample_gue(task.size, engine));
    const BroadcastingModel model(equal_priors(config.d_s), {hams}, {pure_ground(task.size)});
    const SpectralDecomposition h_eig = eigh(assemble_total_hamiltonian(model));
    const std::vector<double> grid =
        make_time_grid(h_eig, config.time_samples, mix64(seed.master_seed ^ seed.stream_index));
    const ErrorBoundReport report =
        verify_error_bound(model, ObserverGrouping::singletons(1), 0, grid);

    SampleRecord& r = out.records[t];
    r.sample_index = task.sample_index;
    r.d_k = task.size;
    r.e_eq = report.e_eq;
    r.e_obj = report.e_obj;
    r.d_eff = report.d_eff;
    out.bounds[t] = {task.sample_index, task.size, report.empirical_average, report.bound,
                     report.margin, report.passed};
  });
  out.aggregates = aggregate(out.records);
  return out;
}

ExperimentResult run_porter_thomas(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult out;
  const PorterThomasEstimate pt = porter_thomas_limit(config.samples, config.master_seed);
  out.aggregates.push_back({"porter_thomas:estimate", pt.estimate, 0.0, config.samples});
  out.aggregates.push_back({"porter_thomas:closed_form", pt.closed_form, 0.0, 1});
  for (std::size_t d : config.dims) {
    const OverlapMoments m = gue_overlap_moments(d, config.samples, config.master_seed);
    out.aggregates.push_back({"mean_y:gue:d_k=" + std::to_string(d), m.mean_y, 0.0, m.count});
    out.aggregates.push_back(
        {"mean_sqrt_y:gue:d_k=" + std::to_string(d), m.mean_sqrt_y, 0.0, m.count});
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::kEquilibrationScan: return run_equilibration_scan(config);
    case ExperimentKind::kFidelityScan: return run_fidelity_scan(config);
    case ExperimentKind::kThermalScan: return run_thermal_scan(config);
    case ExperimentKind::kBoundVerify: return run_bound_verify(config);
    case ExperimentKind::kPorterThomas: return run_porter_thomas(config);
  }
  throw std::invalid_argument("run_experiment: unknown kind");
}

AggregateRow summarize(std::string group_key, std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: no values for " + group_key);
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  AggregateRow row;
  row.group_key = std::move(group_key);
  row.mean = mean;
  row.variance = values.size() > 1 ? sq / (n - 1.0) : 0.0;
  row.count = values.size();
  return row;
}

std::vector<AggregateRow> aggregate(std::span<const SampleRecord> records) {
  if (records.empty()) throw std::invalid_argument("aggregate: empty record list");
  struct Group {
    std::string suffix;
    bool n_qubits = false;
    std::vector<double> e_eq, e_obj, d_eff;
  };
  std::map<std::tuple<int, std::size_t, double>, Group> groups;
  for (const SampleRecord& r : records) {
    Group& g = groups[group_order(r)];
    if (g.suffix.empty()) {
      g.suffix = group_suffix(r);
      g.n_qubits = r.scenario == Scenario::kNQubits;
    }
    g.e_eq.push_back(r.e_eq);
    g.e_obj.push_back(r.e_obj);
    g.d_eff.push_back(r.d_eff);
  }
  std::vector<AggregateRow> rows;
  for (auto& [order, g] : groups) {
    rows.push_back(summarize("d_eff:" + g.suffix, std::move(g.d_eff)));
    rows.push_back(summarize("e_eq:" + g.suffix, std::move(g.e_eq)));
    AggregateRow obj = summarize("e_obj:" + g.suffix, std::move(g.e_obj));
    if (g.n_qubits) {
      // Delta method, scaled per sample so standard_error() is the SE of
      // log2 of the mean.
      const double ln2 = std::numbers::ln2;
      AggregateRow lg;
      lg.group_key = "log2_mean_e_obj:" + g.suffix;
      lg.mean = std::log2(obj.mean);
      lg.variance = obj.variance / (obj.mean * obj.mean * ln2 * ln2);
      lg.count = obj.count;
      rows.push_back(std::move(obj));
      rows.push_back(std::move(lg));
    } else {
      rows.push_back(std::move(obj));
    }
  }
  return rows;
}

double porter_thomas_statistic(std::span<const double> y) {
  if (y.empty()) throw std::invalid_argument("porter_thomas_statistic: empty input");
  double sum_y = 0.0, sum_sqrt = 0.0;
  for (double v : y) {
    if (v < 0.0) throw std::invalid_argument("porter_thomas_statistic: negative sample");
    sum_y += v;
    sum_sqrt += std::sqrt(v);
  }
  const auto n = static_cast<double>(y.size());
  return std::pow(sum_sqrt / n, 4) * (sum_y / n);
}

double porter_thomas_closed_form() { return std::numbers::pi * std::numbers::pi / 16.0; }

PorterThomasEstimate porter_thomas_limit(std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("porter_thomas_limit: samples must be >= 1");
  Engine engine = make_engine(RngSeed{seed, kTagPorterThomas << 56});
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> y(samples);
  for (double& v : y) v = exp1(engine);
  return {porter_thomas_statistic(y), porter_thomas_closed_form()};
}

OverlapMoments gue_overlap_moments(std::size_t dim, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("gue_overlap_moments: samples must be >= 1");
  Engine engine = make_engine(
      RngSeed{seed, (kTagOverlapMoments << 56) | (static_cast<std::uint64_t>(dim) << 32)});
  double sum_y = 0.0, sum_sqrt = 0.0;
  const auto d = static_cast<double>(dim);
  for (std::size_t s = 0; s < samples; ++s) {
    const SpectralDecomposition sd = eigh(sample_gue(dim, engine));
    for (Eigen::Index n = 0; n < sd.eigenvectors.cols(); ++n) {
      const double y = d * std::norm(sd.eigenvectors(0, n));
      sum_y += y;
      sum_sqrt += std::sqrt(y);
    }
  }
  OverlapMoments m;
  m.count = samples * dim;
  m.mean_y = sum_y / static_cast<double>(m.count);
  m.mean_sqrt_y = sum_sqrt / static_cast<double>(m.count);
  return m;
}

std::size_t resolve_thread_count(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MEQ_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace meq
