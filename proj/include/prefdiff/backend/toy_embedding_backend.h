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
#include <string>
#include <vector>

#include "prefdiff/backend/backend.h"

namespace prefdiff {

/// Differentiable soft-copy model over a frozen random embedding table.
///
/// With encoder rows x_1..x_m (token embeddings or injected vectors) and unit
/// token embeddings e_v:
///
///   z_v        = log( exp(prior_v) + sum_j exp(sharpness * <e_v, x_j>) )
///   log P(v)   = z_v - logsumexp_u z_u
///
/// A fixed set of "filler" ids carries a raised prior, standing in for the
/// language prior a pretrained decoder has for function words. Like the copy
/// model it ignores the decoder prefix. Gradients are available with respect
/// to injected vectors only; the table and priors never change.
class ToyEmbeddingBackend final : public Backend {
 public:
  struct Options {
    std::size_t vocab_size = 512;
    std::size_t dim = 32;
    double sharpness = 4.0;
    std::size_t filler_count = 12;
    double filler_prior = 2.0;
    std::uint64_t seed = 13;
    std::size_t max_encoder_length = 1024;
    std::size_t piece_chars = 0;
  };

  explicit ToyEmbeddingBackend(Options options);

  /// Surface form of lexicon entry `id` (1 <= id < vocab_size).
  static std::string lexicon_word(TokenId id);
  bool is_filler(TokenId id) const;
  const Options& options() const { return options_; }

  std::string name() const override { return "toy-embedding"; }
  const BackendCapabilities& capabilities() const override { return caps_; }
  TokenizedText tokenize(std::string_view text) const override;
  std::vector<double> token_embedding(TokenId id) const override;
  std::string fingerprint() const override;
  std::uint64_t parameter_checksum() const override;

 protected:
  std::vector<double> do_logprobs(const EncoderInput& input,
                                  std::span<const TokenId> target) const override;
  ForwardBackward do_logprobs_vjp(const EncoderInput& input,
                                  std::span<const TokenId> target,
                                  std::span<const double> upstream) const override;

 private:
  struct Forward {
    std::size_t m = 0;
    std::vector<double> scores;  // vocab_size x m, sharpness * <e_v, x_j>
    std::vector<double> z;       // per-vocab log evidence
    double log_norm = 0.0;
  };

  std::vector<double> gather_rows(const EncoderInput& input) const;
  Forward forward(const std::vector<double>& rows, bool keep_scores) const;

  Options options_;
  BackendCapabilities caps_;
  std::vector<double> table_;  // vocab_size x dim
  std::vector<double> prior_;  // vocab_size
  std::shared_ptr<Vocabulary> vocab_;
  ToyTokenizer tokenizer_;
};

}  // namespace prefdiff
