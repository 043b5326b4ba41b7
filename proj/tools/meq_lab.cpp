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

// meq-lab <subcommand> --config <path> [--set key=value]... [--out <dir>]

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "meq/config.hpp"
#include "meq/experiments.hpp"
#include "meq/io.hpp"
#include "meq/selfcheck.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
};

meq::ExperimentConfig load(const Options& opts, meq::ExperimentKind kind) {
  if (opts.config_path.empty()) return meq::parse_config_text("{}", opts.overrides, kind);
  return meq::parse_config(opts.config_path, opts.overrides, kind);
}

void log_groups(const meq::ExperimentResult& result) {
  for (const meq::AggregateRow& row : result.aggregates) {
    std::cerr << row.group_key << " mean=" << meq::format_float(row.mean)
              << " var=" << meq::format_float(row.variance) << " n=" << row.count << "\n";
  }
}

int run_experiment(const Options& opts, meq::ExperimentKind kind) {
  meq::ExperimentConfig config;
  try {
    config = load(opts, kind);
  } catch (const meq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  std::string out_dir = opts.out_dir.empty() ? config.output_path : opts.out_dir;
  if (out_dir.empty()) out_dir = ".";

  try {
    std::filesystem::create_directories(out_dir);
    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    const meq::ExperimentResult result = meq::run_experiment(config);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::filesystem::path dir(out_dir);
    meq::emit_csv(std::span<const meq::SampleRecord>(result.records), (dir / "records.csv").string());
    meq::emit_csv(std::span<const meq::AggregateRow>(result.aggregates),
                  (dir / "aggregates.csv").string());
    meq::write_file((dir / "manifest.json").string(), meq::manifest_json(config, started, elapsed));
    log_groups(result);

    if (kind == meq::ExperimentKind::kBoundVerify) {
      meq::emit_csv(std::span<const meq::BoundRecord>(result.bounds),
                    (dir / "bound_verify.csv").string());
      std::size_t failed = 0;
      for (const meq::BoundRecord& b : result.bounds) failed += b.passed ? 0 : 1;
      std::cerr << "bound_verify: " << result.bounds.size() - failed << "/" << result.bounds.size()
                << " instances within the bound\n";
      if (failed > 0) return kExitRuntime;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int run_selfcheck(const Options& opts) {
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  if (!opts.config_path.empty() || !opts.overrides.empty()) {
    try {
      const meq::ExperimentConfig config = load(opts, meq::ExperimentKind::kEquilibrationScan);
      seed = config.master_seed;
      threads = config.threads;
    } catch (const meq::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfig;
    }
  }
  bool ok = true;
  for (const meq::CheckResult& r : meq::run_selfcheck(seed, threads)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo studies of objectivity through equilibration"};
  app.set_version_flag("--version", meq::version_string());
  app.require_subcommand(1);

  Options opts;
  const std::vector<std::pair<std::string, std::optional<meq::ExperimentKind>>> commands = {
      {"equilibration-scan", meq::ExperimentKind::kEquilibrationScan},
      {"fidelity-scan", meq::ExperimentKind::kFidelityScan},
      {"thermal-scan", meq::ExperimentKind::kThermalScan},
      {"bound-verify", meq::ExperimentKind::kBoundVerify},
      {"porter-thomas", meq::ExperimentKind::kPorterThomas},
      {"selfcheck", std::nullopt},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, kind] : commands) {
    CLI::App* sub = app.add_subcommand(name, kind ? "Run " + std::string(meq::to_string(*kind))
                                                   : "Run the invariant suite at reduced size");
    sub->add_option("--config", opts.config_path, "JSON experiment config");
    sub->add_option("--set", opts.overrides, "Override a config field (key=value)")
        ->allow_extra_args(false);
    sub->add_option("--out", opts.out_dir, "Output directory");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  for (std::size_t c = 0; c < commands.size(); ++c) {
    if (!subs[c]->parsed()) continue;
    const auto& kind = commands[c].second;
    return kind ? run_experiment(opts, *kind) : run_selfcheck(opts);
  }
  return kExitConfig;
}
