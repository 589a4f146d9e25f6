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

#include "prefdiff/backend/toy_embedding_backend.h"

#include <cmath>
#include <random>
#include <sstream>

#include "prefdiff/common/error.h"
#include "prefdiff/common/text.h"
#include "prefdiff/kernels/kernels.h"

namespace prefdiff {
namespace {

std::vector<std::string> make_lexicon(std::size_t vocab_size) {
  std::vector<std::string> lex;
  lex.reserve(vocab_size);
  for (std::size_t i = 1; i < vocab_size; ++i) {
    lex.push_back(ToyEmbeddingBackend::lexicon_word(static_cast<TokenId>(i)));
  }
  return lex;
}

}  // namespace

std::string ToyEmbeddingBackend::lexicon_word(TokenId id) {
  return "w" + std::to_string(id);
}

ToyEmbeddingBackend::ToyEmbeddingBackend(Options options)
    : options_(options),
      vocab_(Vocabulary::hashed(options.vocab_size, make_lexicon(options.vocab_size))),
      tokenizer_(vocab_, options.piece_chars) {
  if (options_.vocab_size < 2) raise(ErrorCode::kConfig, "vocab_size must be >= 2");
  if (options_.dim < 1) raise(ErrorCode::kConfig, "dim must be >= 1");
  if (options_.max_encoder_length < 1) {
    raise(ErrorCode::kConfig, "max_encoder_length must be >= 1");
  }
  if (options_.filler_count + 1 > options_.vocab_size) {
    raise(ErrorCode::kConfig, "filler_count must be below vocab_size");
  }
  if (!(options_.sharpness > 0.0)) raise(ErrorCode::kConfig, "sharpness must be > 0");

  const std::size_t V = options_.vocab_size;
  const std::size_t d = options_.dim;
  std::mt19937_64 rng(options_.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  table_.resize(V * d);
  for (std::size_t v = 0; v < V; ++v) {
    double norm = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double x = normal(rng);
      table_[v * d + k] = x;
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (std::size_t k = 0; k < d; ++k) table_[v * d + k] /= norm;
  }
  prior_.assign(V, 0.0);
  for (std::size_t v = 1; v <= options_.filler_count; ++v) prior_[v] = options_.filler_prior;

  caps_.vocab_size = V;
  caps_.max_encoder_length = options_.max_encoder_length;
  caps_.supports_embedding_injection = true;
  caps_.supports_gradients = true;
  caps_.thread_safe = true;
  caps_.embedding_dim = d;
}

bool ToyEmbeddingBackend::is_filler(TokenId id) const {
  return id >= 1 && static_cast<std::size_t>(id) <= options_.filler_count;
}

TokenizedText ToyEmbeddingBackend::tokenize(std::string_view text) const {
  return tokenizer_.tokenize(text);
}

std::vector<double> ToyEmbeddingBackend::token_embedding(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= options_.vocab_size) {
    raise(ErrorCode::kShape, "token id out of vocabulary range");
  }
  const std::size_t d = options_.dim;
  return {table_.begin() + id * d, table_.begin() + (id + 1) * d};
}

std::vector<double> ToyEmbeddingBackend::gather_rows(const EncoderInput& input) const {
  const std::size_t d = options_.dim;
  std::vector<double> rows;
  rows.reserve(input.length() * d);
  for (const auto& seg : input.segments()) {
    if (const auto* ids = std::get_if<std::vector<TokenId>>(&seg)) {
      for (TokenId t : *ids) {
        if (t < 0 || static_cast<std::size_t>(t) >= options_.vocab_size) {
          raise(ErrorCode::kShape, "encoder token id out of vocabulary range");
        }
        rows.insert(rows.end(), table_.begin() + t * d, table_.begin() + (t + 1) * d);
      }
    } else {
      const auto& block = std::get<EmbeddingView>(seg);
      rows.insert(rows.end(), block.values.begin(), block.values.end());
    }
  }
  return rows;
}

ToyEmbeddingBackend::Forward ToyEmbeddingBackend::forward(const std::vector<double>& rows,
                                                          bool keep_scores) const {
  const auto& k = kernels::active();
  const std::size_t V = options_.vocab_size;
  const std::size_t d = options_.dim;
  Forward f;
  f.m = rows.size() / d;
  f.z.resize(V);
  if (keep_scores) f.scores.resize(V * f.m);
  std::vector<double> buf(f.m + 1);
  for (std::size_t v = 0; v < V; ++v) {
    buf[0] = prior_[v];
    k.gemv(rows.data(), f.m, d, table_.data() + v * d, buf.data() + 1);
    for (std::size_t j = 1; j <= f.m; ++j) buf[j] *= options_.sharpness;
    f.z[v] = k.logsumexp(buf.data(), buf.size());
    if (keep_scores) std::copy(buf.begin() + 1, buf.end(), f.scores.begin() + v * f.m);
  }
  f.log_norm = k.logsumexp(f.z.data(), V);
  return f;
}

std::vector<double> ToyEmbeddingBackend::do_logprobs(const EncoderInput& input,
                                                     std::span<const TokenId> target) const {
  const Forward f = forward(gather_rows(input), false);
  std::vector<double> out;
  out.reserve(target.size());
  for (TokenId t : target) out.push_back(f.z[t] - f.log_norm);
  return out;
}

ForwardBackward ToyEmbeddingBackend::do_logprobs_vjp(const EncoderInput& input,
                                                     std::span<const TokenId> target,
                                                     std::span<const double> upstream) const {
  const auto& k = kernels::active();
  const std::size_t V = options_.vocab_size;
  const std::size_t d = options_.dim;
  const Forward f = forward(gather_rows(input), true);

  ForwardBackward out;
  out.logprobs.reserve(target.size());
  for (TokenId t : target) out.logprobs.push_back(f.z[t] - f.log_norm);

  // dL/dz_v = sum_i u_i [v == y_i] - (sum_i u_i) * P(v)
  std::vector<double> g(V);
  double total = 0.0;
  for (double u : upstream) total += u;
  k.exp_shift(f.z.data(), V, f.log_norm, g.data());
  for (std::size_t v = 0; v < V; ++v) g[v] *= -total;
  for (std::size_t i = 0; i < target.size(); ++i) g[target[i]] += upstream[i];

  // dz_v/dx_j = sharpness * exp(s_vj - z_v) * e_v
  std::vector<double> c(V);
  std::size_t pos = 0;
  for (const auto& seg : input.segments()) {
    if (const auto* ids = std::get_if<std::vector<TokenId>>(&seg)) {
      pos += ids->size();
      continue;
    }
    const auto& block = std::get<EmbeddingView>(seg);
    std::vector<double> grad(block.rows * d);
    for (std::size_t r = 0; r < block.rows; ++r, ++pos) {
      for (std::size_t v = 0; v < V; ++v) {
        c[v] = options_.sharpness * g[v] * std::exp(f.scores[v * f.m + pos] - f.z[v]);
      }
      k.gemv_t(table_.data(), V, d, c.data(), grad.data() + r * d);
    }
    out.block_grads.push_back(std::move(grad));
  }
  return out;
}

std::string ToyEmbeddingBackend::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  os << "toy-embedding:vocab_size=" << options_.vocab_size << ";dim=" << options_.dim
     << ";sharpness=" << options_.sharpness << ";filler_count=" << options_.filler_count
     << ";filler_prior=" << options_.filler_prior << ";seed=" << options_.seed
     << ";checksum=" << text::hex64(parameter_checksum());
  return os.str();
}

std::uint64_t ToyEmbeddingBackend::parameter_checksum() const {
  std::uint64_t h = text::fnv1a_bytes(table_.data(), table_.size() * sizeof(double));
  h = text::fnv1a_bytes(prior_.data(), prior_.size() * sizeof(double), h);
  return text::fnv1a_bytes(&options_.sharpness, sizeof(double), h);
}

}  // namespace prefdiff
