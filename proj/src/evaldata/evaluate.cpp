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

#include "prefdiff/evaldata/evaluate.h"

#include <algorithm>

#include "prefdiff/common/error.h"

namespace prefdiff {
namespace {

std::vector<PairRecord> to_records(std::span<const AnnotatedExample> examples) {
  std::vector<PairRecord> records;
  records.reserve(examples.size());
  for (const auto& ex : examples) records.push_back({ex.id, ex.document, ex.summary});
  return records;
}

}  // namespace

TokenEvaluation evaluate_token_scores(std::span<const AnnotatedExample> examples,
                                      std::vector<TokenScoreSeq> scores,
                                      const ThresholdPolicy& policy) {
  if (scores.size() != examples.size()) {
    raise(ErrorCode::kAlignment, "one score sequence per example required");
  }
  TokenEvaluation ev;
  ev.threshold = resolve_threshold(policy, scores);
  std::vector<std::vector<int>> golds;
  std::vector<std::string> splits;
  std::vector<double> pooled;
  std::vector<int> pooled_labels;
  std::size_t positives = 0, total = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    if (!ex.word_labels) raise(ErrorCode::kConfig, "example '" + ex.id + "' has no word_labels");
    if (ex.word_labels->size() != scores[i].word_pdiff.size()) {
      raise(ErrorCode::kAlignment, "example '" + ex.id + "': " +
                                       std::to_string(scores[i].word_pdiff.size()) +
                                       " scored words vs " +
                                       std::to_string(ex.word_labels->size()) + " labels");
    }
    const auto labels = apply_threshold(scores[i], ev.threshold);
    std::vector<int> pred(labels.begin(), labels.end());
    positives += static_cast<std::size_t>(std::count(pred.begin(), pred.end(), 1));
    total += pred.size();
    ev.predictions.push_back(std::move(pred));
    golds.push_back(*ex.word_labels);
    splits.push_back(split_of(ex));
    pooled.insert(pooled.end(), scores[i].word_pdiff.begin(), scores[i].word_pdiff.end());
    pooled_labels.insert(pooled_labels.end(), ex.word_labels->begin(), ex.word_labels->end());
  }
  ev.f1 = token_f1(ev.predictions, golds, splits);
  ev.predicted_positive_rate = total ? static_cast<double>(positives) / static_cast<double>(total) : 0.0;
  const auto unfactual = std::count(pooled_labels.begin(), pooled_labels.end(), 1);
  if (unfactual > 0 && static_cast<std::size_t>(unfactual) < pooled_labels.size()) {
    ev.histogram = emit_histogram(pooled, pooled_labels);
  }
  ev.scores = std::move(scores);
  return ev;
}

TokenEvaluation evaluate_tokens(std::span<const AnnotatedExample> examples,
                                const PairScorer& scorer, const ThresholdPolicy& policy,
                                std::size_t workers) {
  const auto records = to_records(examples);
  auto results = score_batch(scorer, records, workers);
  std::vector<TokenScoreSeq> scores;
  scores.reserve(results.size());
  for (auto& r : results) {
    if (!r.ok()) throw Error(r.failure->code, r.failure->message);
    scores.push_back(std::move(*r.scores));
  }
  return evaluate_token_scores(examples, std::move(scores), policy);
}

SummaryEvaluation evaluate_summaries(std::span<const AnnotatedExample> examples,
                                     const PairScorer& scorer, std::size_t workers) {
  const auto records = to_records(examples);
  const auto results = score_batch(scorer, records, workers);
  SummaryEvaluation ev;
  std::vector<double> human;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].ok()) throw Error(results[i].failure->code, results[i].failure->message);
    if (!examples[i].summary_label) {
      raise(ErrorCode::kConfig, "example '" + examples[i].id + "' has no summary_label");
    }
    ev.scores.push_back(results[i].summary_score);
    human.push_back(*examples[i].summary_label);
  }
  ev.pearson = pearson(ev.scores, human);
  return ev;
}

double category_consistency(const AnnotatedExample& ex, Category category) {
  if (!ex.category_labels) return 1.0;
  const auto& labels = *ex.category_labels;
  const std::string name(category_name(category));
  return std::find(labels.begin(), labels.end(), name) == labels.end() ? 1.0 : 0.0;
}

namespace {

std::optional<double> try_pearson(const std::vector<double>& x, const std::vector<double>& y,
                                  const std::string& what, std::vector<std::string>& notes) {
  try {
    return pearson(x, y);
  } catch (const Error& e) {
    notes.push_back(what + ": " + e.what());
    return std::nullopt;
  }
}

}  // namespace

CategoryEvaluation category_evaluate(std::span<const AnnotatedExample> examples,
                                     Category category, const PairScorer& scorer,
                                     const CorefProvider& coref) {
  CategoryEvaluation ev;
  ev.category = category;
  std::vector<const AnnotatedExample*> kept;
  for (const auto& ex : examples) {
    if (!ex.category_labels) {
      raise(ErrorCode::kConfig, "example '" + ex.id + "' has no category_labels");
    }
    if (category == Category::kCorefE && coref.coreference(ex.summary).pronoun_indices.empty()) {
      ++ev.excluded;
      continue;
    }
    kept.push_back(&ex);
  }
  ev.retained = kept.size();
  if (kept.size() < 3) {
    raise(ErrorCode::kDegenerate, std::string(category_name(category)) + ": only " +
                                      std::to_string(kept.size()) + " pairs retained (" +
                                      std::to_string(ev.excluded) + " excluded)");
  }

  std::vector<double> base, variant, overall, cat, oute;
  bool have_overall = true;
  for (const auto* ex : kept) {
    base.push_back(*scorer.category_score(ex->document, ex->summary, Category::kOutE));
    variant.push_back(*scorer.category_score(ex->document, ex->summary, category));
    cat.push_back(category_consistency(*ex, category));
    oute.push_back(category_consistency(*ex, Category::kOutE));
    if (ex->summary_label) {
      overall.push_back(*ex->summary_label);
    } else {
      have_overall = false;
    }
  }

  ev.pearson = pearson(variant, cat);
  ev.variant.category = ev.pearson;
  ev.base.category = try_pearson(base, cat, "base/category", ev.notes);
  ev.base.oute = try_pearson(base, oute, "base/OutE", ev.notes);
  ev.variant.oute = try_pearson(variant, oute, "variant/OutE", ev.notes);
  if (have_overall) {
    ev.base.overall = try_pearson(base, overall, "base/overall", ev.notes);
    ev.variant.overall = try_pearson(variant, overall, "variant/overall", ev.notes);
  } else {
    ev.notes.push_back("overall column skipped: some examples lack summary_label");
  }
  return ev;
}

}  // namespace prefdiff
