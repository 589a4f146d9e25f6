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

#include "prefdiff/backend/backend.h"

#include <cmath>

#include "prefdiff/common/error.h"

namespace prefdiff {

EncoderInput& EncoderInput::append(std::vector<TokenId> ids) {
  if (!ids.empty()) segments_.emplace_back(std::move(ids));
  return *this;
}

EncoderInput& EncoderInput::append(TokenId id) {
  return append(std::vector<TokenId>{id});
}

EncoderInput& EncoderInput::append(EmbeddingView block) {
  if (block.rows > 0) segments_.emplace_back(block);
  return *this;
}

EncoderInput& EncoderInput::append(const EncoderInput& other) {
  for (const auto& s : other.segments_) segments_.push_back(s);
  return *this;
}

std::size_t EncoderInput::length() const {
  std::size_t n = 0;
  for (const auto& s : segments_) {
    if (const auto* ids = std::get_if<std::vector<TokenId>>(&s)) {
      n += ids->size();
    } else {
      n += std::get<EmbeddingView>(s).rows;
    }
  }
  return n;
}

std::size_t EncoderInput::block_count() const {
  std::size_t n = 0;
  for (const auto& s : segments_) n += std::holds_alternative<EmbeddingView>(s);
  return n;
}

void Backend::check_call(const EncoderInput& input,
                         std::span<const TokenId> target) const {
  const auto& caps = capabilities();
  if (target.empty()) raise(ErrorCode::kEmptyInput, "forced decoding needs a non-empty target");
  if (input.length() > caps.max_encoder_length) {
    raise(ErrorCode::kLengthExceeded,
          "encoder input of length " + std::to_string(input.length()) +
              " exceeds max_encoder_length " +
              std::to_string(caps.max_encoder_length));
  }
  if (input.has_blocks()) {
    if (!caps.supports_embedding_injection) {
      raise(ErrorCode::kCapability,
            "backend '" + name() + "' does not accept embedding blocks");
    }
    for (const auto& s : input.segments()) {
      if (const auto* b = std::get_if<EmbeddingView>(&s)) {
        if (b->dim != caps.embedding_dim || b->values.size() != b->rows * b->dim) {
          raise(ErrorCode::kDimension,
                "embedding block of width " + std::to_string(b->dim) +
                    " does not match backend width " +
                    std::to_string(caps.embedding_dim));
        }
      }
    }
  }
  for (TokenId t : target) {
    if (t < 0 || static_cast<std::size_t>(t) >= caps.vocab_size) {
      raise(ErrorCode::kShape, "target token id out of vocabulary range");
    }
  }
}

std::vector<double> Backend::logprobs(const EncoderInput& input,
                                      std::span<const TokenId> target) const {
  check_call(input, target);
  return do_logprobs(input, target);
}

ForwardBackward Backend::logprobs_vjp(const EncoderInput& input,
                                      std::span<const TokenId> target,
                                      std::span<const double> upstream) const {
  if (!capabilities().supports_gradients) {
    raise(ErrorCode::kCapability, "backend '" + name() + "' has no gradient support");
  }
  check_call(input, target);
  if (upstream.size() != target.size()) {
    raise(ErrorCode::kShape, "upstream gradient length differs from target length");
  }
  return do_logprobs_vjp(input, target, upstream);
}

std::vector<double> Backend::token_embedding(TokenId) const {
  raise(ErrorCode::kCapability, "backend '" + name() + "' exposes no embedding table");
}

ForwardBackward Backend::do_logprobs_vjp(const EncoderInput&, std::span<const TokenId>,
                                         std::span<const double>) const {
  raise(ErrorCode::kCapability, "backend '" + name() + "' has no gradient support");
}

}  // namespace prefdiff
