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

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prefdiff/backend/backend.h"
#include "prefdiff/prompts/facts.h"
#include "prefdiff/prompts/prompt.h"
#include "prefdiff/tuning/prompt_vector.h"

namespace prefdiff {

enum class Reduction { kMean, kMax, kSum };
enum class SummaryAggregate { kMean, kSum };
/// What to do when prompt + document exceed the backend's encoder length.
enum class Truncation { kError, kKeepHead, kKeepTail };
enum class Category { kEntE, kCorefE, kOutE };

Reduction parse_reduction(std::string_view name);
std::string_view reduction_name(Reduction r);
SummaryAggregate parse_aggregate(std::string_view name);
Truncation parse_truncation(std::string_view name);
std::string_view truncation_name(Truncation t);
Category parse_category(std::string_view name);
std::string_view category_name(Category c);

struct ScoringConfig {
  PromptVariant prompt_variant = PromptVariant::kBase;
  Reduction subword_reduction = Reduction::kMean;
  double category_weight_multiplier = 2.0;
  std::shared_ptr<const PromptVector> prompt_vector;
  // Reserved separator token between prompt and document in the second pass.
  bool use_separator = true;
  // Put the separator between the two vector blocks of the first pass.
  bool pass1_separator = false;
  Truncation truncation = Truncation::kKeepHead;
  SummaryAggregate summary_aggregate = SummaryAggregate::kMean;

  void validate() const;
};

/// Per-token probability differential of one summary: subword level, and
/// reduced to whitespace words.
struct TokenScoreSeq {
  std::vector<double> subword_pdiff;
  std::vector<double> word_pdiff;
  std::vector<std::size_t> word_map;
  std::vector<double> weights;  // one per word, default 1.0
  bool truncated = false;

  void validate() const;
};

/// Encoder inputs of both passes plus the tokenized summary.
struct PassInputs {
  TokenizedText summary;
  EncoderInput document_only;
  EncoderInput with_prompt;
  bool truncated = false;
};

/// Tokenizes and composes both passes, truncating the document per
/// `config.truncation` so that the longer pass fits.
PassInputs build_pass_inputs(std::string_view document, std::string_view summary,
                             std::string_view prompt_text, const ScoringConfig& config,
                             const Backend& backend);

std::vector<double> reduce_subwords(std::span<const double> subword_pdiff,
                                    std::span<const std::size_t> word_map, Reduction reduction);

/// Two forced-decoding passes over the summary, document-only and
/// prompt + document; subword_pdiff[i] = logP2[i] - logP1[i].
TokenScoreSeq score_pair_with_prompt(std::string_view document, std::string_view summary,
                                     std::string_view prompt_text, const ScoringConfig& config,
                                     const Backend& backend);

TokenScoreSeq score_pair(std::string_view document, std::string_view summary,
                         const PromptSpec& spec, const ScoringConfig& config,
                         const Backend& backend);

/// Negated weighted mean of word scores (higher = more consistent). With
/// SummaryAggregate::kSum the weighted sum is negated instead.
double summary_score(const TokenScoreSeq& scores,
                     SummaryAggregate aggregate = SummaryAggregate::kMean);

/// Convenience wrapper that derives prompt facts from providers.
class PairScorer {
 public:
  PairScorer(const Backend& backend, ScoringConfig config, FactProviders providers);

  const ScoringConfig& config() const { return config_; }
  const Backend& backend() const { return backend_; }

  PromptSpec prompt_spec(std::string_view summary, PromptVariant variant) const;

  /// Scores with config().prompt_variant and uniform weights.
  TokenScoreSeq score(std::string_view document, std::string_view summary) const;

  /// Category-targeted summary score; std::nullopt for a CorefE request on a
  /// summary without pronouns (the pair is excluded, not scored).
  std::optional<double> category_score(std::string_view document, std::string_view summary,
                                       Category category) const;

 private:
  const Backend& backend_;
  ScoringConfig config_;
  FactProviders providers_;
};

std::optional<double> category_score(std::string_view document, std::string_view summary,
                                     Category category, const Backend& backend,
                                     const ScoringConfig& config = {});

}  // namespace prefdiff
