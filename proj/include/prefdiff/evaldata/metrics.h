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

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace prefdiff {

/// Token confusion counts with inconsistent (1) as the positive class.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  Confusion& operator+=(const Confusion& o);
  double precision() const;
  double recall() const;
  /// 2PR / (P + R), or 0 when P + R = 0.
  double f1() const;
  /// No predicted and no gold positives; F1 is 0 by convention.
  bool degenerate() const { return tp + fp == 0 && tp + fn == 0; }
};

/// Throws AlignmentError on a length mismatch.
Confusion confusion(std::span<const int> predictions, std::span<const int> golds);

struct F1Report {
  std::map<std::string, Confusion> per_split;
  std::map<std::string, double> per_split_f1;
  double average_split_f1 = 0.0;
  Confusion corpus;
  double corpus_f1 = 0.0;
  std::vector<std::string> degenerate_splits;
};

/// Per-split F1 pools tokens within each split; corpus F1 pools all tokens.
F1Report token_f1(const std::vector<std::vector<int>>& predictions,
                  const std::vector<std::vector<int>>& golds,
                  const std::vector<std::string>& splits);

/// Sample Pearson correlation. Requires equal lengths >= 3 and non-zero
/// variance on both sides (DegenerateError names the constant side).
double pearson(std::span<const double> scores, std::span<const double> human);

struct Histogram {
  std::size_t bins = 50;
  double raw_min = 0.0;
  double raw_max = 0.0;
  std::vector<std::size_t> factual;
  std::vector<std::size_t> unfactual;
  double mean_factual = 0.0;    // mean normalized score
  double mean_unfactual = 0.0;

  double bin_low(std::size_t b) const { return static_cast<double>(b) / bins; }
  double bin_high(std::size_t b) const { return static_cast<double>(b + 1) / bins; }
};

/// Min-max normalizes the pooled scores to [0, 1] and bins each class.
/// `labels` uses 1 for unfactual. DegenerateError if either class is empty.
Histogram emit_histogram(std::span<const double> scores, std::span<const int> labels,
                         std::size_t bins = 50);

}  // namespace prefdiff
