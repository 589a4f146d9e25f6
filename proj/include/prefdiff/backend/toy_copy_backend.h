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
#include <unordered_set>

#include "prefdiff/backend/backend.h"

namespace prefdiff {

struct ToyModelParams {
  double copy_mass = 0.5;       // share of mass spread uniformly over the source set
  std::size_t vocab_size = 50000;

  void validate() const;
};

/// log( copy_mass * [token in source] / |source| + (1 - copy_mass) / vocab_size ).
/// Throws DegenerateSource when `source_set` is empty.
double toy_logprob(const ToyModelParams& params,
                   const std::unordered_set<TokenId>& source_set, TokenId token);

/// Order-insensitive copy model. The source set is every distinct non-separator
/// token id of the encoder input; the decoder prefix is ignored, so every score
/// has a closed form.
class ToyCopyBackend final : public Backend {
 public:
  struct Options {
    ToyModelParams model;
    std::size_t max_encoder_length = 4096;
    std::size_t piece_chars = 0;
  };

  explicit ToyCopyBackend(Options options);

  std::string name() const override { return "toy-copy"; }
  const BackendCapabilities& capabilities() const override { return caps_; }
  TokenizedText tokenize(std::string_view text) const override;
  std::string fingerprint() const override;
  std::uint64_t parameter_checksum() const override;

  const ToyModelParams& params() const { return options_.model; }

 protected:
  std::vector<double> do_logprobs(const EncoderInput& input,
                                  std::span<const TokenId> target) const override;

 private:
  Options options_;
  BackendCapabilities caps_;
  std::shared_ptr<Vocabulary> vocab_;
  ToyTokenizer tokenizer_;
};

}  // namespace prefdiff
