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

#include "prefdiff/evaldata/synthetic.h"

#include <algorithm>
#include <random>
#include <unordered_set>

#include "prefdiff/backend/toy_embedding_backend.h"
#include "prefdiff/common/error.h"
#include "prefdiff/common/text.h"

namespace prefdiff {
namespace {

constexpr const char* kSystems[] = {"sys-a", "sys-b", "sys-c", "sys-d"};

}  // namespace

std::vector<AnnotatedExample> make_synthetic_corpus(const SyntheticOptions& o) {
  const std::size_t first_content = o.filler_count + 1;
  if (o.vocab_size <= first_content + o.doc_max) {
    raise(ErrorCode::kConfig, "synthetic vocabulary too small for the document length");
  }
  if (o.doc_min == 0 || o.doc_min >= o.doc_max || o.summary_min == 0 ||
      o.summary_min >= o.summary_max) {
    raise(ErrorCode::kConfig, "synthetic length ranges must be non-empty");
  }
  if (o.copy_rate < 0 || o.filler_rate < 0 || o.copy_rate + o.filler_rate > 1.0) {
    raise(ErrorCode::kConfig, "synthetic rates must be non-negative and sum to at most 1");
  }
  if (o.filler_rate > 0 && o.filler_count == 0) {
    raise(ErrorCode::kConfig, "filler_rate > 0 needs filler_count > 0");
  }

  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<TokenId> content(o.vocab_size - first_content);
  for (std::size_t i = 0; i < content.size(); ++i) content[i] = static_cast<TokenId>(first_content + i);

  std::vector<AnnotatedExample> out;
  out.reserve(o.count);
  for (std::size_t n = 0; n < o.count; ++n) {
    const auto doc_len = std::uniform_int_distribution<std::size_t>(o.doc_min, o.doc_max - 1)(rng);
    const auto sum_len =
        std::uniform_int_distribution<std::size_t>(o.summary_min, o.summary_max - 1)(rng);
    // partial Fisher-Yates for distinct document ids
    for (std::size_t i = 0; i < doc_len; ++i) {
      const auto j = std::uniform_int_distribution<std::size_t>(i, content.size() - 1)(rng);
      std::swap(content[i], content[j]);
    }
    std::vector<TokenId> doc(content.begin(), content.begin() + static_cast<std::ptrdiff_t>(doc_len));
    const std::unordered_set<TokenId> in_doc(doc.begin(), doc.end());

    std::vector<std::string> doc_words, sum_words;
    for (auto id : doc) doc_words.push_back(ToyEmbeddingBackend::lexicon_word(id));
    std::vector<int> labels;
    for (std::size_t k = 0; k < sum_len; ++k) {
      const double r = unit(rng);
      TokenId id;
      int label = 0;
      if (r < o.copy_rate) {
        id = doc[std::uniform_int_distribution<std::size_t>(0, doc_len - 1)(rng)];
      } else if (r < o.copy_rate + o.filler_rate) {
        id = static_cast<TokenId>(std::uniform_int_distribution<std::size_t>(1, o.filler_count)(rng));
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, content.size() - 1);
        do {
          id = content[pick(rng)];
        } while (in_doc.count(id));
        label = 1;
      }
      sum_words.push_back(ToyEmbeddingBackend::lexicon_word(id));
      labels.push_back(label);
    }

    AnnotatedExample ex;
    ex.id = "syn-" + std::to_string(o.seed) + "-" + std::to_string(n);
    ex.document = text::join(doc_words, " ");
    ex.summary = text::join(sum_words, " ");
    ex.source_system = kSystems[n % 4];
    const auto bad = std::count(labels.begin(), labels.end(), 1);
    ex.summary_label = 1.0 - static_cast<double>(bad) / static_cast<double>(labels.size());
    ex.category_labels = bad > 0 ? std::vector<std::string>{"OutE"} : std::vector<std::string>{};
    ex.word_labels = std::move(labels);
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace prefdiff
