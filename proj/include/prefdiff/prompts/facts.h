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
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prefdiff/prompts/prompt.h"

namespace prefdiff {

bool is_pronoun(std::string_view word);

/// Capitalized-word-run heuristic. A run breaks at a word with trailing
/// punctuation; a run consisting of one sentence-initial stopword ("The",
/// "He", "A", ...) is dropped.
std::vector<EntitySpan> extract_entities(std::string_view summary);

/// Closed-list pronoun match (he, she, it, they, him, her, them, his, hers,
/// its, their). No referents are produced.
FactAnnotation resolve_pronouns(std::string_view summary);

class EntityProvider {
 public:
  virtual ~EntityProvider() = default;
  virtual std::string name() const = 0;
  virtual std::vector<EntitySpan> entities(std::string_view summary) const = 0;
};

class CorefProvider {
 public:
  virtual ~CorefProvider() = default;
  virtual std::string name() const = 0;
  /// Fills pronoun_indices and, when the provider can, coref_links.
  virtual FactAnnotation coreference(std::string_view summary) const = 0;
};

class RuleEntityProvider final : public EntityProvider {
 public:
  std::string name() const override { return "rule"; }
  std::vector<EntitySpan> entities(std::string_view summary) const override {
    return extract_entities(summary);
  }
};

class RuleCorefProvider final : public CorefProvider {
 public:
  std::string name() const override { return "rule"; }
  FactAnnotation coreference(std::string_view summary) const override {
    return resolve_pronouns(summary);
  }
};

std::string summary_key(std::string_view summary);

/// JSONL store of fact annotations keyed by summary hash:
///   {"key": "<hex>", "entity_spans": [[start, end, "surface"], ...],
///    "pronoun_indices": [...], "coref_links": [[index, "referent"], ...]}
/// Annotations produced offline by an external NER or coreference system are
/// fed in through this file.
class FactCache {
 public:
  FactCache() = default;
  FactCache(FactCache&& other) noexcept : entries_(std::move(other.entries_)) {}

  static FactCache load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::optional<FactAnnotation> find(std::string_view summary) const;
  void put(std::string_view summary, FactAnnotation facts);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, FactAnnotation> entries_;
};

/// Serves annotations from a cache and falls back to `inner` on a miss.
class CachedEntityProvider final : public EntityProvider {
 public:
  CachedEntityProvider(std::shared_ptr<const FactCache> cache,
                       std::shared_ptr<const EntityProvider> inner)
      : cache_(std::move(cache)), inner_(std::move(inner)) {}
  std::string name() const override { return "jsonl"; }
  std::vector<EntitySpan> entities(std::string_view summary) const override;

 private:
  std::shared_ptr<const FactCache> cache_;
  std::shared_ptr<const EntityProvider> inner_;
};

class CachedCorefProvider final : public CorefProvider {
 public:
  CachedCorefProvider(std::shared_ptr<const FactCache> cache,
                      std::shared_ptr<const CorefProvider> inner)
      : cache_(std::move(cache)), inner_(std::move(inner)) {}
  std::string name() const override { return "jsonl"; }
  FactAnnotation coreference(std::string_view summary) const override;

 private:
  std::shared_ptr<const FactCache> cache_;
  std::shared_ptr<const CorefProvider> inner_;
};

struct FactProviders {
  std::shared_ptr<const EntityProvider> ner;
  std::shared_ptr<const CorefProvider> coref;
};

/// Provider names: "rule" or "jsonl" (requires `cache_path`).
FactProviders make_fact_providers(const std::string& ner, const std::string& coref,
                                  const std::string& cache_path);

}  // namespace prefdiff
