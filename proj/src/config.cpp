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

#include "meq/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace meq {

namespace {

using nlohmann::json;

std::size_t read_count(const json& v, const std::string& field) {
  if (!v.is_number_unsigned()) {
    throw ConfigError(field, "expected a nonnegative integer, got " + v.dump());
  }
  return v.get<std::size_t>();
}

std::vector<std::size_t> read_counts(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field, "expected an array of integers, got " + v.dump());
  std::vector<std::size_t> out;
  for (const json& e : v) out.push_back(read_count(e, field));
  return out;
}

std::string read_string(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "expected a string, got " + v.dump());
  return v.get<std::string>();
}

void apply_field(ExperimentConfig& c, const std::string& key, const json& v) {
  if (key == "kind") {
    const auto kind = parse_experiment_kind(read_string(v, key));
    if (!kind) throw ConfigError(key, "unknown experiment kind " + v.dump());
    c.kind = *kind;
  } else if (key == "d_S") {
    c.d_s = read_count(v, key);
  } else if (key == "dims") {
    c.dims = read_counts(v, key);
  } else if (key == "qubit_counts") {
    c.qubit_counts = read_counts(v, key);
  } else if (key == "nbar_values") {
    if (!v.is_array()) throw ConfigError(key, "expected an array of numbers, got " + v.dump());
    c.nbar_values.clear();
    for (const json& e : v) {
      if (!e.is_number()) throw ConfigError(key, "expected a number, got " + e.dump());
      c.nbar_values.push_back(e.get<double>());
    }
  } else if (key == "samples") {
    c.samples = read_count(v, key);
  } else if (key == "master_seed") {
    if (!v.is_number_unsigned()) {
      throw ConfigError(key, "expected a nonnegative integer, got " + v.dump());
    }
    c.master_seed = v.get<std::uint64_t>();
  } else if (key == "output_path") {
    c.output_path = read_string(v, key);
  } else if (key == "initial_state") {
    const auto s = parse_initial_state(read_string(v, key));
    if (!s) throw ConfigError(key, "expected \"pure\" or \"maximally_mixed\", got " + v.dump());
    c.initial_state = *s;
  } else if (key == "time_samples") {
    c.time_samples = read_count(v, key);
  } else if (key == "threads") {
    c.threads = read_count(v, key);
  } else {
    throw ConfigError(key, "unknown field");
  }
}

json parse_override_value(const std::string& text) {
  json v = json::parse(text, nullptr, /*allow_exceptions=*/false);
  return v.is_discarded() ? json(text) : v;
}

}  // namespace

const std::vector<std::string>& config_field_names() {
  static const std::vector<std::string> names = {
      "kind",        "d_S",          "dims",          "qubit_counts", "nbar_values", "samples",
      "master_seed", "output_path", "initial_state", "time_samples", "threads"};
  return names;
}

ExperimentConfig parse_config_text(std::string_view text, const std::vector<std::string>& overrides,
                                   std::optional<ExperimentKind> implied_kind) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw ConfigError("", "malformed JSON in config");
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");

  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError(item, "override must have the form key=value");
    }
    const std::string key = item.substr(0, eq);
    const auto& names = config_field_names();
    if (std::find(names.begin(), names.end(), key) == names.end()) {
      throw ConfigError(key, "unknown field");
    }
    doc[key] = parse_override_value(item.substr(eq + 1));
  }

  ExperimentConfig config;
  bool has_kind = false;
  for (const auto& [key, value] : doc.items()) {
    apply_field(config, key, value);
    has_kind = has_kind || key == "kind";
  }
  if (implied_kind) {
    if (!has_kind) {
      config.kind = *implied_kind;
    } else if (config.kind != *implied_kind) {
      throw ConfigError("kind", "config kind " + std::string(to_string(config.kind)) +
                                    " does not match subcommand " +
                                    std::string(to_string(*implied_kind)));
    }
  } else if (!has_kind) {
    throw ConfigError("kind", "missing required field");
  }

  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(": ");
    if (colon == std::string::npos) throw ConfigError("", msg);
    throw ConfigError(msg.substr(0, colon), msg.substr(colon + 2));
  }
  return config;
}

ExperimentConfig parse_config(const std::string& path, const std::vector<std::string>& overrides,
                              std::optional<ExperimentKind> implied_kind) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides, implied_kind);
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["kind"] = std::string(to_string(c.kind));
  j["d_S"] = c.d_s;
  j["dims"] = c.dims;
  j["qubit_counts"] = c.qubit_counts;
  j["nbar_values"] = c.nbar_values;
  j["samples"] = c.samples;
  j["master_seed"] = c.master_seed;
  j["output_path"] = c.output_path;
  j["initial_state"] = std::string(to_string(c.initial_state));
  j["time_samples"] = c.time_samples;
  j["threads"] = c.threads;
  return j.dump(2);
}

}  // namespace meq
