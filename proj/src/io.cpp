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

#include "meq/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "meq/config.hpp"

namespace meq {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& cell, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != cell.size() || cell.empty()) {
    throw std::runtime_error("records CSV line " + std::to_string(line_no) + ": bad number '" +
                             cell + "'");
  }
  return v;
}

std::size_t parse_index(const std::string& cell, std::size_t line_no) {
  const double v = parse_double(cell, line_no);
  if (v < 0.0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw std::runtime_error("records CSV line " + std::to_string(line_no) + ": bad integer '" +
                             cell + "'");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

std::string format_float(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string records_csv(std::span<const SampleRecord> records) {
  std::string out = std::string(kRecordsHeader) + "\n";
  for (const SampleRecord& r : records) {
    out += std::to_string(r.sample_index) + "," + std::string(to_string(r.scenario)) + "," +
           std::to_string(r.d_k) + "," + (r.n ? std::to_string(*r.n) : "") + "," +
           (r.nbar ? format_float(*r.nbar) : "") + "," + format_float(r.e_eq) + "," +
           format_float(r.e_obj) + "," + format_float(r.d_eff) + "\n";
  }
  return out;
}

std::string aggregates_csv(std::span<const AggregateRow> rows) {
  std::string out = std::string(kAggregatesHeader) + "\n";
  for (const AggregateRow& r : rows) {
    out += r.group_key + "," + format_float(r.mean) + "," + format_float(r.variance) + "," +
           std::to_string(r.count) + "\n";
  }
  return out;
}

std::string bounds_csv(std::span<const BoundRecord> rows) {
  std::string out = std::string(kBoundsHeader) + "\n";
  for (const BoundRecord& r : rows) {
    out += std::to_string(r.sample_index) + "," + std::to_string(r.d_k) + "," +
           format_float(r.empirical_average) + "," + format_float(r.bound) + "," +
           format_float(r.margin) + "," + (r.passed ? "true" : "false") + "\n";
  }
  return out;
}

std::vector<SampleRecord> parse_records_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kRecordsHeader) {
    throw std::runtime_error("records CSV: unexpected header '" + line + "'");
  }
  std::vector<SampleRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    if (cells.size() != 8) {
      throw std::runtime_error("records CSV line " + std::to_string(line_no) + ": expected 8 cells");
    }
    SampleRecord r;
    r.sample_index = parse_index(cells[0], line_no);
    if (cells[1] == "single_qudit") {
      r.scenario = Scenario::kSingleQudit;
    } else if (cells[1] == "n_qubits") {
      r.scenario = Scenario::kNQubits;
    } else {
      throw std::runtime_error("records CSV line " + std::to_string(line_no) + ": bad scenario '" +
                               cells[1] + "'");
    }
    r.d_k = parse_index(cells[2], line_no);
    if (!cells[3].empty()) r.n = parse_index(cells[3], line_no);
    if (!cells[4].empty()) r.nbar = parse_double(cells[4], line_no);
    r.e_eq = parse_double(cells[5], line_no);
    r.e_obj = parse_double(cells[6], line_no);
    r.d_eff = parse_double(cells[7], line_no);
    out.push_back(r);
  }
  return out;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << contents;
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path);
}

void emit_csv(std::span<const SampleRecord> records, const std::string& path) {
  write_file(path, records_csv(records));
}

void emit_csv(std::span<const AggregateRow> rows, const std::string& path) {
  write_file(path, aggregates_csv(rows));
}

void emit_csv(std::span<const BoundRecord> rows, const std::string& path) {
  write_file(path, bounds_csv(rows));
}

std::string version_string() { return std::string(MEQ_VERSION) + " (" + MEQ_GIT_DESCRIBE + ")"; }

std::string manifest_json(const ExperimentConfig& config, const std::string& started_utc,
                          double elapsed_seconds) {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(config_to_json(config));
  j["version"] = version_string();
  j["started_utc"] = started_utc;
  j["elapsed_seconds"] = elapsed_seconds;
  return j.dump(2) + "\n";
}

}  // namespace meq
