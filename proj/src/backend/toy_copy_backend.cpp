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

#include "prefdiff/backend/toy_copy_backend.h"

#include <cmath>
#include <sstream>

#include "prefdiff/common/error.h"
#include "prefdiff/common/text.h"

namespace prefdiff {

void ToyModelParams::validate() const {
  if (!(copy_mass > 0.0 && copy_mass < 1.0)) {
    raise(ErrorCode::kConfig, "copy_mass must lie in (0, 1)");
  }
  if (vocab_size < 2) raise(ErrorCode::kConfig, "vocab_size must be >= 2");
}

double toy_logprob(const ToyModelParams& params,
                   const std::unordered_set<TokenId>& source_set, TokenId token) {
  if (source_set.empty()) raise(ErrorCode::kDegenerateSource, "empty source set");
  const double copy =
      source_set.count(token) ? params.copy_mass / static_cast<double>(source_set.size())
                              : 0.0;
  return std::log(copy + (1.0 - params.copy_mass) / static_cast<double>(params.vocab_size));
}

ToyCopyBackend::ToyCopyBackend(Options options)
    : options_(options),
      vocab_(Vocabulary::interning(options.model.vocab_size)),
      tokenizer_(vocab_, options.piece_chars) {
  options_.model.validate();
  if (options_.max_encoder_length < 1) {
    raise(ErrorCode::kConfig, "max_encoder_length must be >= 1");
  }
  caps_.vocab_size = options_.model.vocab_size;
  caps_.max_encoder_length = options_.max_encoder_length;
  caps_.supports_embedding_injection = false;
  caps_.supports_gradients = false;
  caps_.thread_safe = true;
}

TokenizedText ToyCopyBackend::tokenize(std::string_view text) const {
  return tokenizer_.tokenize(text);
}

std::vector<double> ToyCopyBackend::do_logprobs(const EncoderInput& input,
                                                std::span<const TokenId> target) const {
  std::unordered_set<TokenId> source;
  for (const auto& seg : input.segments()) {
    for (TokenId t : std::get<std::vector<TokenId>>(seg)) {
      if (t != separator()) source.insert(t);
    }
  }
  std::vector<double> out;
  out.reserve(target.size());
  for (TokenId t : target) out.push_back(toy_logprob(options_.model, source, t));
  return out;
}

std::string ToyCopyBackend::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  os << "toy-copy:copy_mass=" << options_.model.copy_mass
     << ";vocab_size=" << options_.model.vocab_size
     << ";piece_chars=" << options_.piece_chars;
  return os.str();
}

std::uint64_t ToyCopyBackend::parameter_checksum() const {
  return text::fnv1a(fingerprint());
}

}  // namespace prefdiff
