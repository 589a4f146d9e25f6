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
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace prefdiff {

using TokenId = std::int32_t;

/// Subword sequence with an alignment back to whitespace words.
struct TokenizedText {
  std::vector<TokenId> subword_ids;
  std::vector<std::string> subword_strings;
  // One entry per subword: index of the whitespace word it belongs to.
  std::vector<std::size_t> word_map;

  std::size_t size() const { return subword_ids.size(); }
  std::size_t word_count() const {
    return word_map.empty() ? 0 : word_map.back() + 1;
  }
  /// Throws ShapeError when lengths disagree or word_map is not
  /// 0-based, monotone and gap free.
  void validate() const;
  /// Concatenates subword strings grouped by word_map.
  std::vector<std::string> words() const;
};

/// Maps surface pieces to ids in [0, capacity). Id 0 is the reserved
/// separator. Two policies:
///  - interning: ids assigned in order of first appearance; raises once full.
///  - hashed: a fixed lexicon keeps its ids and every other piece is hashed
///    into the non-reserved range, so ids never depend on call order.
class Vocabulary {
 public:
  static constexpr TokenId kSeparator = 0;

  static std::unique_ptr<Vocabulary> interning(std::size_t capacity);
  static std::unique_ptr<Vocabulary> hashed(std::size_t capacity,
                                            std::vector<std::string> lexicon);

  TokenId id(std::string_view piece) const;
  std::size_t capacity() const { return capacity_; }

 private:
  Vocabulary(std::size_t capacity, bool interning);

  std::size_t capacity_;
  bool interning_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, TokenId> ids_;
};

/// Whitespace tokenizer. Edge punctuation is split into one piece per
/// character and, when `piece_chars > 0`, word cores are chunked into pieces
/// of at most that many bytes.
class ToyTokenizer {
 public:
  ToyTokenizer(std::shared_ptr<const Vocabulary> vocab, std::size_t piece_chars = 0)
      : vocab_(std::move(vocab)), piece_chars_(piece_chars) {}

  /// Throws EmptyInput on empty or whitespace-only text.
  TokenizedText tokenize(std::string_view text) const;

  const Vocabulary& vocabulary() const { return *vocab_; }

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  std::size_t piece_chars_;
};

}  // namespace prefdiff
