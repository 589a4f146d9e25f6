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
#include <optional>
#include <vector>

#include "prefdiff/backend/backend.h"

namespace prefdiff {

/// Block of `length` continuous vectors of width `dim`, spliced around the
/// prompt text in the second pass and next to each other in the first. The
/// only trainable parameters of the pipeline.
struct PromptVector {
  static constexpr std::size_t kMaxLength = 512;

  std::size_t length = 0;
  std::size_t dim = 0;
  std::vector<double> values;  // length x dim, row-major
  std::uint64_t init_seed = 0;

  std::size_t parameter_count() const { return length * dim; }
  EmbeddingView view() const { return {values, length, dim}; }
  void validate() const;

  /// Rows copied from the backend's token-embedding table at uniformly drawn
  /// vocabulary indices.
  static PromptVector from_token_embeddings(const Backend& backend, std::size_t length,
                                            std::uint64_t seed);
};

enum class Pass { kDocumentOnly = 1, kWithPrompt = 2 };

/// Splices the vector into a pass's encoder input:
///   document-only: [V] [V] [document]        ([V] [sep] [V] [document] with
///                                              `pass1_separator`)
///   with-prompt:   [V] [prompt] [V] [document]
/// `prompt` already ends with the separator token. A null or zero-length
/// vector yields the untuned composition. Throws DimensionError when the
/// vector width differs from `backend_dim`.
EncoderInput compose_encoder_input(Pass pass, const PromptVector* vector,
                                   const EncoderInput& prompt, const EncoderInput& document,
                                   std::size_t backend_dim,
                                   std::optional<TokenId> pass1_separator = std::nullopt);

}  // namespace prefdiff
