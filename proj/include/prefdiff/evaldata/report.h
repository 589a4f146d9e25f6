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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "prefdiff/evaldata/evaluate.h"

namespace prefdiff {

struct EvaluationReport {
  std::map<std::string, double> per_split_f1;
  std::optional<double> average_split_f1;
  std::optional<double> corpus_f1;
  std::map<std::string, double> pearson;  // dataset name -> summary-level Pearson
  std::map<std::string, CategoryEvaluation> categories;
  std::optional<double> threshold_used;
  std::optional<double> predicted_positive_rate;
  std::optional<Histogram> histogram;
  std::size_t truncated_pairs = 0;
  std::vector<std::string> notes;

  void add_tokens(const TokenEvaluation& ev);
  void add_category(const CategoryEvaluation& ev);
};

nlohmann::json report_to_json(const EvaluationReport& report);

/// Writes report.json and whichever CSV tables have data:
///   split_f1.csv, corpus_f1.csv, summary_pearson.csv,
///   category_ente.csv, category_corefe.csv, category_oute.csv, histogram.csv.
/// Returns the paths written.
std::vector<std::filesystem::path> write_report(const EvaluationReport& report,
                                                const std::filesystem::path& dir);

}  // namespace prefdiff
