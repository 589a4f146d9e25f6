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

#include "prefdiff/scoring/scoring.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "prefdiff/common/error.h"
#include "prefdiff/common/text.h"

namespace prefdiff {

Reduction parse_reduction(std::string_view name) {
  if (name == "mean") return Reduction::kMean;
  if (name == "max") return Reduction::kMax;
  if (name == "sum") return Reduction::kSum;
  raise(ErrorCode::kConfig, "unknown subword_reduction '" + std::string(name) + "'");
}

std::string_view reduction_name(Reduction r) {
  switch (r) {
    case Reduction::kMean: return "mean";
    case Reduction::kMax: return "max";
    case Reduction::kSum: return "sum";
  }
  return "mean";
}

SummaryAggregate parse_aggregate(std::string_view name) {
  if (name == "mean") return SummaryAggregate::kMean;
  if (name == "sum") return SummaryAggregate::kSum;
  raise(ErrorCode::kConfig, "unknown summary_aggregate '" + std::string(name) + "'");
}

Truncation parse_truncation(std::string_view name) {
  if (name == "error") return Truncation::kError;
  if (name == "keep_head") return Truncation::kKeepHead;
  if (name == "keep_tail") return Truncation::kKeepTail;
  raise(ErrorCode::kConfig, "unknown truncation policy '" + std::string(name) + "'");
}

std::string_view truncation_name(Truncation t) {
  switch (t) {
    case Truncation::kError: return "error";
    case Truncation::kKeepHead: return "keep_head";
    case Truncation::kKeepTail: return "keep_tail";
  }
  return "keep_head";
}

Category parse_category(std::string_view name) {
  if (name == "EntE") return Category::kEntE;
  if (name == "CorefE") return Category::kCorefE;
  if (name == "OutE") return Category::kOutE;
  raise(ErrorCode::kConfig, "unknown category '" + std::string(name) + "'");
}

std::string_view category_name(Category c) {
  switch (c) {
    case Category::kEntE: return "EntE";
    case Category::kCorefE: return "CorefE";
    case Category::kOutE: return "OutE";
  }
  return "OutE";
}

void ScoringConfig::validate() const {
  if (!(category_weight_multiplier > 0.0)) {
    raise(ErrorCode::kConfig, "category_weight_multiplier must be > 0");
  }
  if (prompt_vector) prompt_vector->validate();
}

void TokenScoreSeq::validate() const {
  if (subword_pdiff.size() != word_map.size()) {
    raise(ErrorCode::kShape, "subword scores and word_map differ in length");
  }
  const std::size_t words = word_map.empty() ? 0 : word_map.back() + 1;
  if (word_pdiff.size() != words || weights.size() != words) {
    raise(ErrorCode::kShape, "word scores, weights and word count disagree");
  }
  for (double v : word_pdiff) {
    if (!std::isfinite(v)) raise(ErrorCode::kShape, "non-finite word score");
  }
  for (double w : weights) {
    if (!(w > 0.0)) raise(ErrorCode::kShape, "word weights must be positive");
  }
}

std::vector<double> reduce_subwords(std::span<const double> subword_pdiff,
                                    std::span<const std::size_t> word_map, Reduction reduction) {
  if (subword_pdiff.size() != word_map.size()) {
    raise(ErrorCode::kShape, "subword scores and word_map differ in length");
  }
  const std::size_t words = word_map.empty() ? 0 : word_map.back() + 1;
  std::vector<double> out(words, reduction == Reduction::kMax ? -INFINITY : 0.0);
  std::vector<std::size_t> counts(words, 0);
  for (std::size_t i = 0; i < subword_pdiff.size(); ++i) {
    const std::size_t w = word_map[i];
    if (w >= words) raise(ErrorCode::kShape, "word_map is not monotone");
    ++counts[w];
    if (reduction == Reduction::kMax) {
      out[w] = std::max(out[w], subword_pdiff[i]);
    } else {
      out[w] += subword_pdiff[i];
    }
  }
  if (reduction == Reduction::kMean) {
    for (std::size_t w = 0; w < words; ++w) out[w] /= static_cast<double>(counts[w]);
  }
  return out;
}

namespace {

std::vector<TokenId> truncate(const std::vector<TokenId>& doc, std::size_t keep,
                              Truncation policy) {
  if (policy == Truncation::kKeepTail) return {doc.end() - keep, doc.end()};
  return {doc.begin(), doc.begin() + keep};
}

}  // namespace

PassInputs build_pass_inputs(std::string_view document, std::string_view summary,
                             std::string_view prompt_text, const ScoringConfig& config,
                             const Backend& backend) {
  const auto& caps = backend.capabilities();
  const PromptVector* pv = config.prompt_vector.get();
  const std::optional<TokenId> pass1_sep =
      config.pass1_separator ? std::optional<TokenId>(backend.separator()) : std::nullopt;

  PassInputs out;
  out.summary = backend.tokenize(summary);
  auto doc_ids = backend.tokenize(document).subword_ids;

  EncoderInput prompt;
  if (!text::split_words(prompt_text).empty()) {
    prompt.append(backend.tokenize(prompt_text).subword_ids);
    if (config.use_separator) prompt.append(backend.separator());
  }

  const EncoderInput empty;
  const std::size_t overhead =
      std::max(compose_encoder_input(Pass::kDocumentOnly, pv, prompt, empty,
                                     caps.embedding_dim, pass1_sep).length(),
               compose_encoder_input(Pass::kWithPrompt, pv, prompt, empty,
                                     caps.embedding_dim, pass1_sep).length());
  if (overhead + doc_ids.size() > caps.max_encoder_length) {
    const std::size_t room =
        caps.max_encoder_length > overhead ? caps.max_encoder_length - overhead : 0;
    if (config.truncation == Truncation::kError || room == 0) {
      raise(ErrorCode::kLengthExceeded,
            "prompt and document need " + std::to_string(overhead + doc_ids.size()) +
                " encoder positions, backend allows " +
                std::to_string(caps.max_encoder_length));
    }
    doc_ids = truncate(doc_ids, room, config.truncation);
    out.truncated = true;
  }
  const EncoderInput doc(std::move(doc_ids));
  out.document_only =
      compose_encoder_input(Pass::kDocumentOnly, pv, prompt, doc, caps.embedding_dim, pass1_sep);
  out.with_prompt =
      prompt.length() == 0
          ? out.document_only
          : compose_encoder_input(Pass::kWithPrompt, pv, prompt, doc, caps.embedding_dim,
                                  pass1_sep);
  return out;
}

TokenScoreSeq score_pair_with_prompt(std::string_view document, std::string_view summary,
                                     std::string_view prompt_text, const ScoringConfig& config,
                                     const Backend& backend) {
  if (text::split_words(document).empty()) raise(ErrorCode::kEmptyInput, "empty document");
  if (text::split_words(summary).empty()) raise(ErrorCode::kEmptyInput, "empty summary");

  const PassInputs in = build_pass_inputs(document, summary, prompt_text, config, backend);
  const auto& target = in.summary.subword_ids;
  const auto p1 = backend.logprobs(in.document_only, target);
  const auto p2 = backend.logprobs(in.with_prompt, target);

  TokenScoreSeq out;
  out.subword_pdiff.resize(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) out.subword_pdiff[i] = p2[i] - p1[i];
  out.word_map = in.summary.word_map;
  out.word_pdiff = reduce_subwords(out.subword_pdiff, out.word_map, config.subword_reduction);
  out.weights.assign(out.word_pdiff.size(), 1.0);
  out.truncated = in.truncated;
  return out;
}

TokenScoreSeq score_pair(std::string_view document, std::string_view summary,
                         const PromptSpec& spec, const ScoringConfig& config,
                         const Backend& backend) {
  const BuiltPrompt prompt = build_prompt(summary, spec);
  return score_pair_with_prompt(document, summary, prompt.text, config, backend);
}

double summary_score(const TokenScoreSeq& scores, SummaryAggregate aggregate) {
  if (scores.word_pdiff.empty()) raise(ErrorCode::kEmptyInput, "no word scores");
  if (scores.weights.size() != scores.word_pdiff.size()) {
    raise(ErrorCode::kShape, "weights and word scores differ in length");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < scores.word_pdiff.size(); ++i) {
    num += scores.weights[i] * scores.word_pdiff[i];
    den += scores.weights[i];
  }
  return aggregate == SummaryAggregate::kSum ? -num : -(num / den);
}

PairScorer::PairScorer(const Backend& backend, ScoringConfig config, FactProviders providers)
    : backend_(backend), config_(std::move(config)), providers_(std::move(providers)) {
  config_.validate();
  if (!providers_.ner) providers_.ner = std::make_shared<const RuleEntityProvider>();
  if (!providers_.coref) providers_.coref = std::make_shared<const RuleCorefProvider>();
}

PromptSpec PairScorer::prompt_spec(std::string_view summary, PromptVariant variant) const {
  PromptSpec spec;
  spec.variant = variant;
  if (variant == PromptVariant::kEntity) {
    spec.entity_spans = providers_.ner->entities(summary);
  } else if (variant == PromptVariant::kCoref) {
    spec.coref_links = providers_.coref->coreference(summary).coref_links;
  }
  return spec;
}

TokenScoreSeq PairScorer::score(std::string_view document, std::string_view summary) const {
  return score_pair(document, summary, prompt_spec(summary, config_.prompt_variant), config_,
                    backend_);
}

std::optional<double> PairScorer::category_score(std::string_view document,
                                                 std::string_view summary,
                                                 Category category) const {
  PromptSpec spec;
  std::set<std::size_t> weighted;
  switch (category) {
    case Category::kOutE:
      spec.variant = PromptVariant::kBase;
      break;
    case Category::kEntE:
      spec.variant = PromptVariant::kEntity;
      spec.entity_spans = providers_.ner->entities(summary);
      for (const auto& s : spec.entity_spans) {
        for (std::size_t w = s.start_word; w < s.end_word; ++w) weighted.insert(w);
      }
      break;
    case Category::kCorefE: {
      const FactAnnotation facts = providers_.coref->coreference(summary);
      if (facts.pronoun_indices.empty()) return std::nullopt;
      spec.variant = PromptVariant::kCoref;
      spec.coref_links = facts.coref_links;
      weighted.insert(facts.pronoun_indices.begin(), facts.pronoun_indices.end());
      break;
    }
  }
  TokenScoreSeq scores = score_pair(document, summary, spec, config_, backend_);
  for (std::size_t w : weighted) {
    if (w < scores.weights.size()) scores.weights[w] = config_.category_weight_multiplier;
  }
  return summary_score(scores, config_.summary_aggregate);
}

std::optional<double> category_score(std::string_view document, std::string_view summary,
                                     Category category, const Backend& backend,
                                     const ScoringConfig& config) {
  return PairScorer(backend, config, {}).category_score(document, summary, category);
}

}  // namespace prefdiff
