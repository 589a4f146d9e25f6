// Copyright 2026 The prefdiff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "prefdiff/scoring/scoring.h"
#include "prefdiff/scoring/threshold.h"
#include "prefdiff/tuning/tuning.h"

namespace prefdiff::cli {

/// Everything a run needs, read from one JSON file plus --set overrides.
///
///   {"seed": 13,
///    "backend": {"name": "toy-copy", "params": {...}},
///    "scoring": {"prompt_variant", "subword_reduction", "category_weight_multiplier",
///                "use_separator", "pass1_separator", "truncation", "summary_aggregate",
///                "prompt_vector", "force_prompt_vector"},
///    "threshold": {"mode": "fixed"|"proportion", "fixed_value", "target_rate"},
///    "facts": {"ner_provider", "coref_provider", "cache_path"},
///    "tuning": {"learning_rate", "epochs", "batch_size", "prompt_length", "patience",
///               "weight_decay", "normalize_loss", "target_rate", "train_limit"},
///    "io": {"input", "output", "dataset", "train", "valid", "report_dir",
///           "checkpoint", "trace", "scores"}}
struct RunConfig {
  std::uint64_t seed = 13;
  std::string backend_name = "toy-copy";
  nlohmann::json backend_params = nlohmann::json::object();

  ScoringConfig scoring;
  std::string prompt_vector_path;
  bool force_prompt_vector = false;

  ThresholdPolicy threshold;

  std::string ner_provider = "rule";
  std::string coref_provider = "rule";
  std::string fact_cache_path;

  TuningConfig tuning;
  std::optional<std::size_t> train_limit;

  struct Io {
    std::string input, output, dataset, train, valid, report_dir, checkpoint, trace, scores;
  } io;
};

/// Applies "section.key=value" to a JSON tree; the value is parsed as JSON
/// when possible and taken as a string otherwise.
void apply_override(nlohmann::json& tree, const std::string& assignment);

/// Strict conversion; unknown keys raise ConfigError naming the dotted key.
RunConfig parse_run_config(const nlohmann::json& tree);

nlohmann::json read_config_file(const std::string& path);

/// Raises ConfigError when a referenced input path does not exist.
void require_file(const std::string& key, const std::string& path);

}  // namespace prefdiff::cli
