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

#include <span>
#include <vector>

#include "prefdiff/scoring/scoring.h"

namespace prefdiff {

struct ThresholdPolicy {
  enum class Mode { kFixed, kProportion };

  Mode mode = Mode::kFixed;
  double fixed_value = 0.0;   // kFixed: label = score > fixed_value
  double target_rate = 0.0;   // kProportion: corpus-level predicted-positive rate

  static ThresholdPolicy fixed(double value) { return {Mode::kFixed, value, 0.0}; }
  static ThresholdPolicy proportion(double rate) { return {Mode::kProportion, 0.0, rate}; }
  void validate() const;
};

/// Threshold t over pooled word scores such that labelling `score > t` marks at
/// most ceil(target_rate * N) words; every word tied with t stays consistent.
/// With k = ceil(target_rate * N) and scores sorted ascending, t is the
/// element at index max(N - k - 1, 0).
double proportion_threshold(std::span<const double> corpus_scores, double target_rate);

/// Fixed mode returns fixed_value. Proportion mode pools word_pdiff over
/// `corpus` and throws ConfigError when the corpus is empty.
double resolve_threshold(const ThresholdPolicy& policy, std::span<const TokenScoreSeq> corpus);

std::vector<bool> apply_threshold(const TokenScoreSeq& scores, double threshold);

/// Proportion mode requires `corpus`; without it ConfigError is raised.
std::vector<bool> predict_inconsistent(const TokenScoreSeq& scores, const ThresholdPolicy& policy,
                                       std::span<const TokenScoreSeq> corpus = {});

}  // namespace prefdiff
