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

#include "prefdiff/scoring/threshold.h"

#include <algorithm>
#include <cmath>

#include "prefdiff/common/error.h"

namespace prefdiff {

void ThresholdPolicy::validate() const {
  if (mode == Mode::kProportion && !(target_rate > 0.0 && target_rate < 1.0)) {
    raise(ErrorCode::kConfig, "threshold.target_rate must lie in (0, 1)");
  }
  if (mode == Mode::kFixed && !std::isfinite(fixed_value)) {
    raise(ErrorCode::kConfig, "threshold.fixed_value must be finite");
  }
}

double proportion_threshold(std::span<const double> corpus_scores, double target_rate) {
  if (corpus_scores.empty()) raise(ErrorCode::kConfig, "proportion threshold needs a corpus");
  std::vector<double> sorted(corpus_scores.begin(), corpus_scores.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  // Guard against target_rate * n landing a hair above an integer.
  const double raw = std::ceil(target_rate * static_cast<double>(n) - 1e-9);
  const std::size_t k = static_cast<std::size_t>(std::clamp(raw, 0.0, static_cast<double>(n)));
  const std::size_t index = n > k ? n - k - 1 : 0;
  return sorted[index];
}

double resolve_threshold(const ThresholdPolicy& policy, std::span<const TokenScoreSeq> corpus) {
  policy.validate();
  if (policy.mode == ThresholdPolicy::Mode::kFixed) return policy.fixed_value;
  std::vector<double> pooled;
  for (const auto& s : corpus) pooled.insert(pooled.end(), s.word_pdiff.begin(), s.word_pdiff.end());
  if (pooled.empty()) {
    raise(ErrorCode::kConfig, "proportion threshold requires a non-empty evaluation corpus");
  }
  return proportion_threshold(pooled, policy.target_rate);
}

std::vector<bool> apply_threshold(const TokenScoreSeq& scores, double threshold) {
  std::vector<bool> labels(scores.word_pdiff.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = scores.word_pdiff[i] > threshold;
  return labels;
}

std::vector<bool> predict_inconsistent(const TokenScoreSeq& scores, const ThresholdPolicy& policy,
                                       std::span<const TokenScoreSeq> corpus) {
  if (scores.word_pdiff.empty()) raise(ErrorCode::kEmptyInput, "no word scores");
  if (policy.mode == ThresholdPolicy::Mode::kProportion && corpus.empty()) {
    raise(ErrorCode::kConfig, "proportion thresholding needs an explicit corpus");
  }
  return apply_threshold(scores, resolve_threshold(policy, corpus));
}

}  // namespace prefdiff
