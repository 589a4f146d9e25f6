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

#include "prefdiff/tuning/prompt_vector.h"

#include <cmath>
#include <random>

#include "prefdiff/common/error.h"

namespace prefdiff {

void PromptVector::validate() const {
  if (length < 1 || length > kMaxLength) {
    raise(ErrorCode::kConfig, "prompt vector length must lie in [1, 512]");
  }
  if (dim < 1) raise(ErrorCode::kDimension, "prompt vector width must be positive");
  if (values.size() != length * dim) {
    raise(ErrorCode::kShape, "prompt vector holds the wrong number of values");
  }
  for (double v : values) {
    if (!std::isfinite(v)) raise(ErrorCode::kShape, "prompt vector has non-finite values");
  }
}

PromptVector PromptVector::from_token_embeddings(const Backend& backend, std::size_t length,
                                                 std::uint64_t seed) {
  const auto& caps = backend.capabilities();
  if (!caps.supports_embedding_injection) {
    raise(ErrorCode::kCapability,
          "backend '" + backend.name() + "' cannot take continuous prompt vectors");
  }
  PromptVector pv;
  pv.length = length;
  pv.dim = caps.embedding_dim;
  pv.init_seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<TokenId> pick(0, static_cast<TokenId>(caps.vocab_size - 1));
  pv.values.reserve(length * pv.dim);
  for (std::size_t r = 0; r < length; ++r) {
    const auto row = backend.token_embedding(pick(rng));
    pv.values.insert(pv.values.end(), row.begin(), row.end());
  }
  pv.validate();
  return pv;
}

EncoderInput compose_encoder_input(Pass pass, const PromptVector* vector,
                                   const EncoderInput& prompt, const EncoderInput& document,
                                   std::size_t backend_dim,
                                   std::optional<TokenId> pass1_separator) {
  const bool tuned = vector != nullptr && vector->length > 0;
  if (tuned && vector->dim != backend_dim) {
    raise(ErrorCode::kDimension, "prompt vector width " + std::to_string(vector->dim) +
                                     " != backend width " + std::to_string(backend_dim));
  }
  EncoderInput out;
  if (tuned) out.append(vector->view());
  if (pass == Pass::kWithPrompt) {
    out.append(prompt);
  } else if (tuned && pass1_separator) {
    out.append(*pass1_separator);
  }
  if (tuned) out.append(vector->view());
  out.append(document);
  return out;
}

}  // namespace prefdiff
