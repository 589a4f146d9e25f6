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

#include "prefdiff/prompts/prompt.h"

#include <algorithm>
#include <set>

#include "prefdiff/common/error.h"
#include "prefdiff/common/text.h"

namespace prefdiff {

std::string_view variant_name(PromptVariant v) {
  switch (v) {
    case PromptVariant::kNone: return "none";
    case PromptVariant::kBase: return "base";
    case PromptVariant::kEntity: return "entity";
    case PromptVariant::kCoref: return "coref";
  }
  return "base";
}

PromptVariant parse_variant(std::string_view name) {
  if (name == "none") return PromptVariant::kNone;
  if (name == "base") return PromptVariant::kBase;
  if (name == "entity") return PromptVariant::kEntity;
  if (name == "coref") return PromptVariant::kCoref;
  raise(ErrorCode::kConfig, "unknown prompt variant '" + std::string(name) + "'");
}

namespace {

void check_spans(const std::vector<EntitySpan>& spans, std::size_t words) {
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (const auto& s : spans) {
    if (s.start_word >= s.end_word || s.end_word > words) {
      raise(ErrorCode::kConfig, "entity span outside summary word range");
    }
    ranges.emplace_back(s.start_word, s.end_word);
  }
  std::sort(ranges.begin(), ranges.end());
  for (std::size_t i = 1; i < ranges.size(); ++i) {
    if (ranges[i].first < ranges[i - 1].second) {
      raise(ErrorCode::kConfig, "entity spans overlap");
    }
  }
}

void check_links(const std::vector<CorefLink>& links, std::size_t words) {
  std::set<std::size_t> seen;
  for (const auto& l : links) {
    if (l.pronoun_word >= words) raise(ErrorCode::kConfig, "pronoun index out of range");
    if (!seen.insert(l.pronoun_word).second) {
      raise(ErrorCode::kConfig, "duplicate pronoun index in coref links");
    }
  }
}

}  // namespace

void PromptSpec::validate(std::size_t summary_words) const {
  if (variant == PromptVariant::kNone && (!entity_spans.empty() || !coref_links.empty())) {
    raise(ErrorCode::kConfig, "variant none cannot carry facts");
  }
  check_spans(entity_spans, summary_words);
  check_links(coref_links, summary_words);
}

void FactAnnotation::validate(std::size_t summary_words) const {
  check_spans(entity_spans, summary_words);
  check_links(coref_links, summary_words);
  std::set<std::size_t> pronouns(pronoun_indices.begin(), pronoun_indices.end());
  if (pronouns.size() != pronoun_indices.size()) {
    raise(ErrorCode::kConfig, "duplicate pronoun index");
  }
  for (const auto& l : coref_links) {
    if (!pronouns.count(l.pronoun_word)) {
      raise(ErrorCode::kConfig, "coref link on a word not listed as a pronoun");
    }
  }
}

BuiltPrompt build_prompt(std::string_view summary, const PromptSpec& spec) {
  const auto words = text::split_words(summary);
  if (words.empty()) raise(ErrorCode::kEmptyInput, "empty summary");
  spec.validate(words.size());

  BuiltPrompt out;
  switch (spec.variant) {
    case PromptVariant::kNone:
      return out;
    case PromptVariant::kBase:
      out.text = std::string(summary);
      return out;
    case PromptVariant::kEntity: {
      std::vector<std::string> surfaces;
      std::set<std::string> seen;
      for (const auto& s : spec.entity_spans) {
        if (seen.insert(s.surface).second) surfaces.push_back(s.surface);
      }
      out.text = std::string(summary);
      if (surfaces.empty()) {
        out.fell_back_to_base = true;
      } else {
        out.text += " | " + text::join(surfaces, "; ");
      }
      return out;
    }
    case PromptVariant::kCoref: {
      if (spec.coref_links.empty()) {
        out.text = std::string(summary);
        return out;
      }
      std::vector<std::string> rebuilt = words;
      for (const auto& link : spec.coref_links) {
        const auto parts = text::split_edges(words[link.pronoun_word]);
        rebuilt[link.pronoun_word] =
            parts.lead + parts.core + " (" + link.referent + ")" + parts.trail;
      }
      out.text = text::join(rebuilt, " ");
      return out;
    }
  }
  return out;
}

}  // namespace prefdiff
