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
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "prefdiff/backend/tokenizer.h"

namespace prefdiff {

struct BackendCapabilities {
  std::size_t vocab_size = 2;
  std::size_t max_encoder_length = 1;
  bool supports_embedding_injection = false;
  bool supports_gradients = false;
  // When false the scoring engine serializes calls into the backend.
  bool thread_safe = true;
  std::size_t embedding_dim = 0;
};

/// Non-owning view over `rows` continuous vectors of width `dim`, row-major.
struct EmbeddingView {
  std::span<const double> values;
  std::size_t rows = 0;
  std::size_t dim = 0;
};

/// Encoder input: an ordered list of segments, each either discrete token ids
/// or a block of continuous vectors spliced in at that position.
class EncoderInput {
 public:
  using Segment = std::variant<std::vector<TokenId>, EmbeddingView>;

  EncoderInput() = default;
  explicit EncoderInput(std::vector<TokenId> ids) { append(std::move(ids)); }

  EncoderInput& append(std::vector<TokenId> ids);
  EncoderInput& append(TokenId id);
  EncoderInput& append(EmbeddingView block);
  EncoderInput& append(const EncoderInput& other);

  const std::vector<Segment>& segments() const { return segments_; }
  std::size_t length() const;
  std::size_t block_count() const;
  bool has_blocks() const { return block_count() > 0; }

 private:
  std::vector<Segment> segments_;
};

/// Log-probabilities plus the gradient of `sum_i upstream[i] * logprob[i]`
/// with respect to every embedding block of the input, in segment order.
struct ForwardBackward {
  std::vector<double> logprobs;
  std::vector<std::vector<double>> block_grads;
};

/// Forced-decoding contract over a frozen generation model.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string name() const = 0;
  virtual const BackendCapabilities& capabilities() const = 0;
  virtual TokenizedText tokenize(std::string_view text) const = 0;
  virtual TokenId separator() const { return Vocabulary::kSeparator; }

  /// Element i is log P(target_i | input, target_<i). Throws EmptyInput on an
  /// empty target, LengthExceeded on over-long input, CapabilityError when
  /// the input carries embedding blocks the backend cannot take.
  std::vector<double> logprobs(const EncoderInput& input,
                               std::span<const TokenId> target) const;

  /// Requires supports_gradients; `upstream` has one weight per target token.
  ForwardBackward logprobs_vjp(const EncoderInput& input,
                               std::span<const TokenId> target,
                               std::span<const double> upstream) const;

  /// Row of the input embedding table. Requires embedding injection.
  virtual std::vector<double> token_embedding(TokenId id) const;

  /// Identifies architecture and weights; stored in prompt-vector checkpoints.
  virtual std::string fingerprint() const = 0;
  /// Checksum over every backbone parameter.
  virtual std::uint64_t parameter_checksum() const = 0;

 protected:
  virtual std::vector<double> do_logprobs(const EncoderInput& input,
                                          std::span<const TokenId> target) const = 0;
  virtual ForwardBackward do_logprobs_vjp(const EncoderInput& input,
                                          std::span<const TokenId> target,
                                          std::span<const double> upstream) const;

 private:
  void check_call(const EncoderInput& input, std::span<const TokenId> target) const;
};

}  // namespace prefdiff
