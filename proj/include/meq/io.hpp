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

#include <span>
#include <string>
#include <vector>

#include "meq/experiments.hpp"

namespace meq {

inline constexpr const char* kRecordsHeader = "sample_index,scenario,d_k,n,nbar,e_eq,e_obj,d_eff";
inline constexpr const char* kAggregatesHeader = "group_key,mean,variance,count";
inline constexpr const char* kBoundsHeader = "sample_index,d_k,empirical_average,bound,margin,passed";

/// "%.12g".
std::string format_float(double x);

std::string records_csv(std::span<const SampleRecord> records);
std::string aggregates_csv(std::span<const AggregateRow> rows);
std::string bounds_csv(std::span<const BoundRecord> rows);

/// Parses the output of records_csv. Throws std::runtime_error on a bad
/// header or malformed row.
std::vector<SampleRecord> parse_records_csv(const std::string& text);

/// Writes `contents` to `path`; throws std::runtime_error naming the path
/// on failure.
void write_file(const std::string& path, const std::string& contents);

void emit_csv(std::span<const SampleRecord> records, const std::string& path);
void emit_csv(std::span<const AggregateRow> rows, const std::string& path);
void emit_csv(std::span<const BoundRecord> rows, const std::string& path);

/// "<version> (<git describe>)".
std::string version_string();

/// Run manifest: config echo, version, UTC start time, wall-clock seconds.
std::string manifest_json(const ExperimentConfig& config, const std::string& started_utc,
                          double elapsed_seconds);

}  // namespace meq
