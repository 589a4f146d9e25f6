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

#include "prefdiff/backend/tokenizer.h"

#include "prefdiff/common/error.h"
#include "prefdiff/common/text.h"

namespace prefdiff {

void TokenizedText::validate() const {
  if (subword_ids.size() != subword_strings.size() ||
      subword_ids.size() != word_map.size()) {
    raise(ErrorCode::kShape, "tokenized text: mismatched sequence lengths");
  }
  for (std::size_t i = 0; i < word_map.size(); ++i) {
    const std::size_t prev = i == 0 ? 0 : word_map[i - 1];
    const bool ok = i == 0 ? word_map[0] == 0
                           : (word_map[i] == prev || word_map[i] == prev + 1);
    if (!ok) raise(ErrorCode::kShape, "tokenized text: word_map has a gap");
  }
}

std::vector<std::string> TokenizedText::words() const {
  std::vector<std::string> out(word_count());
  for (std::size_t i = 0; i < word_map.size(); ++i) {
    out[word_map[i]] += subword_strings[i];
  }
  return out;
}

Vocabulary::Vocabulary(std::size_t capacity, bool interning)
    : capacity_(capacity), interning_(interning) {
  if (capacity < 2) raise(ErrorCode::kConfig, "vocab_size must be >= 2");
}

std::unique_ptr<Vocabulary> Vocabulary::interning(std::size_t capacity) {
  return std::unique_ptr<Vocabulary>(new Vocabulary(capacity, true));
}

std::unique_ptr<Vocabulary> Vocabulary::hashed(std::size_t capacity,
                                               std::vector<std::string> lexicon) {
  std::unique_ptr<Vocabulary> v(new Vocabulary(capacity, false));
  for (std::size_t i = 0; i < lexicon.size() && i + 1 < capacity; ++i) {
    v->ids_.emplace(std::move(lexicon[i]), static_cast<TokenId>(i + 1));
  }
  return v;
}

TokenId Vocabulary::id(std::string_view piece) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = ids_.find(std::string(piece));
  if (it != ids_.end()) return it->second;
  if (!interning_) {
    return static_cast<TokenId>(1 + text::fnv1a(piece) % (capacity_ - 1));
  }
  const std::size_t next = ids_.size() + 1;
  if (next >= capacity_) {
    raise(ErrorCode::kCapability,
          "vocabulary exhausted at " + std::to_string(capacity_) +
              " entries while adding '" + std::string(piece) + "'");
  }
  ids_.emplace(std::string(piece), static_cast<TokenId>(next));
  return static_cast<TokenId>(next);
}

TokenizedText ToyTokenizer::tokenize(std::string_view input) const {
  const auto words = text::split_words(input);
  if (words.empty()) raise(ErrorCode::kEmptyInput, "empty or whitespace-only text");

  TokenizedText out;
  auto push = [&](std::string piece, std::size_t word) {
    out.subword_ids.push_back(vocab_->id(piece));
    out.subword_strings.push_back(std::move(piece));
    out.word_map.push_back(word);
  };
  for (std::size_t w = 0; w < words.size(); ++w) {
    const auto parts = text::split_edges(words[w]);
    for (char c : parts.lead) push(std::string(1, c), w);
    const std::string& core = parts.core;
    if (piece_chars_ == 0 || core.size() <= piece_chars_) {
      if (!core.empty()) push(core, w);
    } else {
      for (std::size_t i = 0; i < core.size(); i += piece_chars_) {
        push(core.substr(i, piece_chars_), w);
      }
    }
    for (char c : parts.trail) push(std::string(1, c), w);
  }
  return out;
}

}  // namespace prefdiff
