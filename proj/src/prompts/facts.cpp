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

#include "prefdiff/prompts/facts.h"

#include <cctype>
#include <fstream>
#include <set>

#include <json.hpp>

#include "prefdiff/common/error.h"
#include "prefdiff/common/text.h"

namespace prefdiff {
namespace {

const std::set<std::string>& pronoun_list() {
  static const std::set<std::string> kPronouns{"he",  "she", "it",   "they", "him", "her",
                                               "them", "his", "hers", "its",  "their"};
  return kPronouns;
}

const std::set<std::string>& sentence_stopwords() {
  static const std::set<std::string> kStop{
      "a",     "an",   "the",   "this",  "that",  "these", "those", "he",    "she",
      "it",    "they", "we",    "i",     "you",   "his",   "her",   "its",   "their",
      "our",   "my",   "in",    "on",    "at",    "for",   "but",   "and",   "or",
      "as",    "if",   "when",  "after", "before", "there", "here",  "what",  "who",
      "why",   "how",  "some",  "many",  "one",   "two",   "while", "since", "during"};
  return kStop;
}

bool ends_sentence(const std::string& trail) {
  return trail.find_first_of(".!?") != std::string::npos;
}

}  // namespace

bool is_pronoun(std::string_view word) {
  return pronoun_list().count(text::to_lower(text::split_edges(word).core)) > 0;
}

std::vector<EntitySpan> extract_entities(std::string_view summary) {
  const auto words = text::split_words(summary);
  std::vector<EntitySpan> spans;
  bool sentence_start = true;
  std::size_t i = 0;
  while (i < words.size()) {
    const auto parts = text::split_edges(words[i]);
    const bool cap = !parts.core.empty() &&
                     std::isupper(static_cast<unsigned char>(parts.core[0]));
    if (!cap) {
      sentence_start = ends_sentence(parts.trail);
      ++i;
      continue;
    }
    const bool run_at_sentence_start = sentence_start;
    const std::size_t start = i;
    std::vector<std::string> cores{parts.core};
    std::string trail = parts.trail;
    ++i;
    while (trail.empty() && i < words.size()) {
      const auto next = text::split_edges(words[i]);
      if (!next.lead.empty() || next.core.empty() ||
          !std::isupper(static_cast<unsigned char>(next.core[0]))) {
        break;
      }
      cores.push_back(next.core);
      trail = next.trail;
      ++i;
    }
    sentence_start = ends_sentence(trail);
    if (cores.size() == 1 && run_at_sentence_start &&
        sentence_stopwords().count(text::to_lower(cores[0]))) {
      continue;
    }
    spans.push_back({start, i, text::join(cores, " ")});
  }
  return spans;
}

FactAnnotation resolve_pronouns(std::string_view summary) {
  FactAnnotation out;
  const auto words = text::split_words(summary);
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (is_pronoun(words[i])) out.pronoun_indices.push_back(i);
  }
  return out;
}

std::string summary_key(std::string_view summary) {
  return text::hex64(text::fnv1a(summary));
}

FactCache FactCache::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kIo, "cannot open fact cache " + path.string());
  FactCache cache;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      FactAnnotation f;
      for (const auto& s : j.value("entity_spans", nlohmann::json::array())) {
        f.entity_spans.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>(),
                                  s.at(2).get<std::string>()});
      }
      f.pronoun_indices =
          j.value("pronoun_indices", nlohmann::json::array()).get<std::vector<std::size_t>>();
      for (const auto& l : j.value("coref_links", nlohmann::json::array())) {
        f.coref_links.push_back({l.at(0).get<std::size_t>(), l.at(1).get<std::string>()});
      }
      cache.entries_[j.at("key").get<std::string>()] = std::move(f);
    } catch (const nlohmann::json::exception& e) {
      raise(ErrorCode::kParse, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cache;
}

void FactCache::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::kIo, "cannot write fact cache " + path.string());
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& [key, f] : entries_) {
    nlohmann::json j;
    j["key"] = key;
    j["entity_spans"] = nlohmann::json::array();
    for (const auto& s : f.entity_spans) {
      j["entity_spans"].push_back({s.start_word, s.end_word, s.surface});
    }
    j["pronoun_indices"] = f.pronoun_indices;
    j["coref_links"] = nlohmann::json::array();
    for (const auto& l : f.coref_links) j["coref_links"].push_back({l.pronoun_word, l.referent});
    out << j.dump() << '\n';
  }
}

std::optional<FactAnnotation> FactCache::find(std::string_view summary) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(summary_key(summary));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void FactCache::put(std::string_view summary, FactAnnotation facts) {
  std::lock_guard<std::mutex> lock(mu_);
  entries_[summary_key(summary)] = std::move(facts);
}

std::size_t FactCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

std::vector<EntitySpan> CachedEntityProvider::entities(std::string_view summary) const {
  if (auto hit = cache_->find(summary)) return hit->entity_spans;
  return inner_->entities(summary);
}

FactAnnotation CachedCorefProvider::coreference(std::string_view summary) const {
  if (auto hit = cache_->find(summary)) {
    hit->entity_spans.clear();
    return *hit;
  }
  return inner_->coreference(summary);
}

FactProviders make_fact_providers(const std::string& ner, const std::string& coref,
                                  const std::string& cache_path) {
  FactProviders p;
  std::shared_ptr<const FactCache> cache;
  auto need_cache = [&]() {
    if (cache) return cache;
    if (cache_path.empty()) {
      raise(ErrorCode::kConfig, "facts.cache_path is required for the jsonl provider");
    }
    cache = std::make_shared<const FactCache>(FactCache::load(cache_path));
    return cache;
  };
  auto rule_ner = std::make_shared<const RuleEntityProvider>();
  auto rule_coref = std::make_shared<const RuleCorefProvider>();
  if (ner == "rule") {
    p.ner = rule_ner;
  } else if (ner == "jsonl") {
    p.ner = std::make_shared<const CachedEntityProvider>(need_cache(), rule_ner);
  } else {
    raise(ErrorCode::kConfig, "unknown facts.ner_provider '" + ner + "'");
  }
  if (coref == "rule") {
    p.coref = rule_coref;
  } else if (coref == "jsonl") {
    p.coref = std::make_shared<const CachedCorefProvider>(need_cache(), rule_coref);
  } else {
    raise(ErrorCode::kConfig, "unknown facts.coref_provider '" + coref + "'");
  }
  return p;
}

}  // namespace prefdiff
