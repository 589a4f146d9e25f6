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
#include <string>
#include <string_view>
#include <vector>

namespace prefdiff {

enum class PromptVariant { kNone, kBase, kEntity, kCoref };

std::string_view variant_name(PromptVariant v);
/// Accepts "none", "base", "entity", "coref"; throws ConfigError otherwise.
PromptVariant parse_variant(std::string_view name);

/// Whitespace-word span [start_word, end_word) of the summary.
struct EntitySpan {
  std::size_t start_word = 0;
  std::size_t end_word = 0;
  std::string surface;

  bool operator==(const EntitySpan&) const = default;
};

struct CorefLink {
  std::size_t pronoun_word = 0;
  std::string referent;

  bool operator==(const CorefLink&) const = default;
};

struct PromptSpec {
  PromptVariant variant = PromptVariant::kBase;
  std::vector<EntitySpan> entity_spans;
  std::vector<CorefLink> coref_links;

  /// Throws ConfigError if spans overlap or fall outside the summary, if
  /// pronoun indices repeat, or if variant none carries facts.
  void validate(std::size_t summary_words) const;
};

struct FactAnnotation {
  std::vector<EntitySpan> entity_spans;
  std::vector<std::size_t> pronoun_indices;
  std::vector<CorefLink> coref_links;

  void validate(std::size_t summary_words) const;
  bool operator==(const FactAnnotation&) const = default;
};

struct BuiltPrompt {
  std::string text;
  // Set when the entity variant had nothing to append and the base prompt
  // was used instead.
  bool fell_back_to_base = false;
};

/// Text fed ahead of the document in the second pass.
///  base   - the summary, verbatim
///  entity - "<summary> | e1; e2" with entity surfaces deduplicated
///  coref  - each referent inserted as "(referent)" right after its pronoun
///  none   - empty
BuiltPrompt build_prompt(std::string_view summary, const PromptSpec& spec);

}  // namespace prefdiff
