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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prefdiff/evaldata/dataset.h"
#include "prefdiff/evaldata/metrics.h"
#include "prefdiff/scoring/batch.h"
#include "prefdiff/scoring/threshold.h"

namespace prefdiff {

struct TokenEvaluation {
  F1Report f1;
  double threshold = 0.0;
  double predicted_positive_rate = 0.0;
  std::optional<Histogram> histogram;
  std::vector<TokenScoreSeq> scores;
  std::vector<std::vector<int>> predictions;
};

/// Thresholds precomputed scores (one per example, word aligned) and compares
/// against word_labels.
TokenEvaluation evaluate_token_scores(std::span<const AnnotatedExample> examples,
                                      std::vector<TokenScoreSeq> scores,
                                      const ThresholdPolicy& policy);

TokenEvaluation evaluate_tokens(std::span<const AnnotatedExample> examples,
                                const PairScorer& scorer, const ThresholdPolicy& policy,
                                std::size_t workers = 1);

struct SummaryEvaluation {
  double pearson = 0.0;
  std::vector<double> scores;
};

/// Pearson between summary_score and summary_label over the examples.
SummaryEvaluation evaluate_summaries(std::span<const AnnotatedExample> examples,
                                     const PairScorer& scorer, std::size_t workers = 1);

/// Human value for a category column: 1 when the category is absent from the
/// example's labels (consistent in that category), 0 when present. Matches
/// the orientation of summary_score.
double category_consistency(const AnnotatedExample& ex, Category category);

struct CategoryRow {
  std::optional<double> overall;
  std::optional<double> category;
  std::optional<double> oute;
};

struct CategoryEvaluation {
  Category category = Category::kEntE;
  std::size_t retained = 0;
  std::size_t excluded = 0;
  CategoryRow base;     // base prompt, uniform weights
  CategoryRow variant;  // category prompt and weights
  double pearson = 0.0; // variant row, category column
  std::vector<std::string> notes;
};

/// CorefE drops summaries without pronouns first. Throws DegenerateError when
/// fewer than 3 pairs remain or the main cell cannot be computed.
CategoryEvaluation category_evaluate(std::span<const AnnotatedExample> examples,
                                     Category category, const PairScorer& scorer,
                                     const CorefProvider& coref);

}  // namespace prefdiff
