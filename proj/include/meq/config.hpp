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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "meq/experiments.hpp"

namespace meq {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  /// Offending field, or empty for file-level errors.
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Recognized JSON field names, in declaration order.
const std::vector<std::string>& config_field_names();

/// Parses a JSON config document. `overrides` are "key=value" strings
/// applied after the document; each value is read as JSON when it parses,
/// otherwise as a bare string. When `implied_kind` is set, a missing
/// "kind" defaults to it and a different one is an error.
ExperimentConfig parse_config_text(std::string_view text,
                                   const std::vector<std::string>& overrides = {},
                                   std::optional<ExperimentKind> implied_kind = std::nullopt);

/// Reads `path` and calls parse_config_text. A missing file is a ConfigError.
ExperimentConfig parse_config(const std::string& path,
                              const std::vector<std::string>& overrides = {},
                              std::optional<ExperimentKind> implied_kind = std::nullopt);

/// Pretty-printed JSON echo of every field.
std::string config_to_json(const ExperimentConfig& config);

}  // namespace meq
