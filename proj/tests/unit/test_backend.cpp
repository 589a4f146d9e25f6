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

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "prefdiff/backend/registry.h"
#include "prefdiff/backend/toy_copy_backend.h"
#include "prefdiff/backend/toy_embedding_backend.h"
#include "prefdiff/common/error.h"
#include "prefdiff/common/text.h"

using namespace prefdiff;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no prefdiff::Error thrown");
  return ErrorCode::kIo;
}

ToyCopyBackend copy_backend(double lambda, std::size_t vocab) {
  ToyCopyBackend::Options o;
  o.model.copy_mass = lambda;
  o.model.vocab_size = vocab;
  return ToyCopyBackend(o);
}

ToyEmbeddingBackend small_embedding() {
  ToyEmbeddingBackend::Options o;
  o.vocab_size = 64;
  o.dim = 8;
  o.filler_count = 4;
  return ToyEmbeddingBackend(o);
}

}  // namespace

TEST_CASE("tokenizer examples") {
  auto b = copy_backend(0.5, 1000);
  const auto sf = b.tokenize("San Francisco");
  CHECK(sf.word_count() == 2);
  CHECK(std::set<std::size_t>(sf.word_map.begin(), sf.word_map.end()).size() == 2);

  const auto a = b.tokenize("a");
  CHECK(a.size() >= 1);
  for (auto w : a.word_map) CHECK(w == 0);

  const auto u = b.tokenize("Uganda was knocked");
  CHECK(u.size() == 3);
  CHECK(u.word_map == std::vector<std::size_t>{0, 1, 2});

  CHECK(code_of([&] { b.tokenize(""); }) == ErrorCode::kEmptyInput);
  CHECK(code_of([&] { b.tokenize(" \t\n "); }) == ErrorCode::kEmptyInput);
}

TEST_CASE("edge punctuation becomes its own subwords of the same word") {
  auto b = copy_backend(0.5, 1000);
  const auto t = b.tokenize("\"He was ousted.\"");
  CHECK(t.word_count() == 3);
  CHECK(t.subword_strings.front() == "\"");
  CHECK(t.subword_strings.back() == "\"");
  CHECK(t.words() == std::vector<std::string>{"\"He", "was", "ousted.\""});
}

TEST_CASE("word_map round-trip recovers the whitespace words") {
  const auto vocab = std::shared_ptr<const Vocabulary>(Vocabulary::hashed(4096, {}));
  std::mt19937_64 rng(3);
  const std::string alphabet = "abcdefghijXYZ.,;:!?()'\"-0123";
  for (std::size_t piece : {0u, 1u, 2u, 3u}) {
    ToyTokenizer tok(vocab, piece);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::string> words(1 + rng() % 8);
      for (auto& w : words) {
        const std::size_t len = 1 + rng() % 9;
        for (std::size_t i = 0; i < len; ++i) w += alphabet[rng() % alphabet.size()];
      }
      const std::string text = "  " + text::join(words, " \t ") + "\n";
      const auto t = tok.tokenize(text);
      t.validate();
      CHECK(t.words() == words);
    }
  }
}

TEST_CASE("validate rejects broken alignments") {
  TokenizedText t{{1, 2}, {"a", "b"}, {0, 2}};
  CHECK(code_of([&] { t.validate(); }) == ErrorCode::kShape);
  TokenizedText u{{1, 2}, {"a"}, {0, 1}};
  CHECK(code_of([&] { u.validate(); }) == ErrorCode::kShape);
}

TEST_CASE("toy_logprob closed-form examples") {
  const ToyModelParams p{0.5, 10};
  const std::unordered_set<TokenId> src{1, 2, 3};
  CHECK(toy_logprob(p, src, 1) == doctest::Approx(std::log(0.5 / 3 + 0.05)).epsilon(1e-12));
  CHECK(std::exp(toy_logprob(p, src, 1)) == doctest::Approx(0.21667).epsilon(1e-4));
  CHECK(toy_logprob(p, src, 4) == doctest::Approx(std::log(0.05)).epsilon(1e-12));
  CHECK(code_of([&] { toy_logprob(p, {}, 1); }) == ErrorCode::kDegenerateSource);
  CHECK(code_of([&] { ToyModelParams{1.0, 10}.validate(); }) == ErrorCode::kConfig);
  CHECK(code_of([&] { ToyModelParams{0.5, 1}.validate(); }) == ErrorCode::kConfig);
}

TEST_CASE("toy_logprob normalizes over the vocabulary") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t V = 2 + rng() % 300;
    const ToyModelParams p{0.01 + 0.98 * std::uniform_real_distribution<double>()(rng), V};
    std::unordered_set<TokenId> src;
    const std::size_t k = 1 + rng() % V;
    while (src.size() < k) src.insert(static_cast<TokenId>(rng() % V));
    double total = 0.0;
    for (std::size_t v = 0; v < V; ++v) total += std::exp(toy_logprob(p, src, static_cast<TokenId>(v)));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("copy backend logprobs follow the formula and ignore the prefix") {
  auto b = copy_backend(0.5, 10);
  const auto doc = b.tokenize("a b c");
  const auto tgt = b.tokenize("a d a");
  const EncoderInput in(doc.subword_ids);
  const auto lp = b.logprobs(in, tgt.subword_ids);
  REQUIRE(lp.size() == 3);
  CHECK(lp[0] == doctest::Approx(std::log(0.5 / 3 + 0.5 / 10)).epsilon(1e-12));
  CHECK(lp[1] == doctest::Approx(std::log(0.05)).epsilon(1e-12));
  CHECK(lp[2] == lp[0]);
  for (double v : lp) CHECK((std::isfinite(v) && v <= 0.0));
  CHECK(b.logprobs(in, tgt.subword_ids) == lp);

  CHECK(code_of([&] { b.logprobs(in, {}); }) == ErrorCode::kEmptyInput);
}

TEST_CASE("separator does not count as a source token") {
  auto b = copy_backend(0.5, 10);
  const auto doc = b.tokenize("a b c");
  EncoderInput with_sep;
  with_sep.append(Vocabulary::kSeparator).append(doc.subword_ids);
  const auto t = b.tokenize("a");
  CHECK(b.logprobs(with_sep, t.subword_ids) == b.logprobs(EncoderInput(doc.subword_ids), t.subword_ids));
}

TEST_CASE("backend contract errors") {
  ToyCopyBackend::Options o;
  o.max_encoder_length = 4;
  ToyCopyBackend b(o);
  const auto doc = b.tokenize("one two three four five");
  const auto t = b.tokenize("one");
  CHECK(code_of([&] { b.logprobs(EncoderInput(doc.subword_ids), t.subword_ids); }) ==
        ErrorCode::kLengthExceeded);

  const std::vector<double> v(8, 0.1);
  EncoderInput blocks;
  blocks.append(EmbeddingView{v, 1, 8});
  CHECK(code_of([&] { b.logprobs(blocks, t.subword_ids); }) == ErrorCode::kCapability);
  CHECK(code_of([&] { b.token_embedding(1); }) == ErrorCode::kCapability);
  const std::vector<double> up{1.0};
  CHECK(code_of([&] { b.logprobs_vjp(EncoderInput(t.subword_ids), t.subword_ids, up); }) ==
        ErrorCode::kCapability);
}

TEST_CASE("embedding backend distribution is normalized and deterministic") {
  const auto b = small_embedding();
  std::vector<TokenId> all(64);
  std::iota(all.begin(), all.end(), 0);
  const auto doc = b.tokenize("w20 w21 w22 w30");
  const std::vector<double> extra = b.token_embedding(40);
  EncoderInput in;
  in.append(EmbeddingView{extra, 1, 8}).append(doc.subword_ids);
  const auto lp = b.logprobs(in, all);
  double total = 0.0;
  for (double v : lp) {
    CHECK(v <= 0.0);
    total += std::exp(v);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(b.logprobs(in, all) == lp);

  const auto again = small_embedding();
  CHECK(again.parameter_checksum() == b.parameter_checksum());
  CHECK(again.fingerprint() == b.fingerprint());
  CHECK(again.logprobs(in, all) == lp);
}

TEST_CASE("embedding backend: lexicon words keep their ids and copying raises probability") {
  const auto b = small_embedding();
  const auto t = b.tokenize("w20 w33");
  CHECK(t.subword_ids == std::vector<TokenId>{20, 33});
  CHECK(b.is_filler(1));
  CHECK(b.is_filler(4));
  CHECK_FALSE(b.is_filler(5));
  const auto with = b.logprobs(EncoderInput(b.tokenize("w20 w21").subword_ids), t.subword_ids);
  const auto without = b.logprobs(EncoderInput(b.tokenize("w22 w21").subword_ids), t.subword_ids);
  CHECK(with[0] > without[0]);
}

TEST_CASE("embedding backend VJP matches central differences") {
  const auto b = small_embedding();
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0.0, 0.4);
  std::vector<double> block(3 * 8);
  for (auto& x : block) x = nd(rng);
  const auto doc = b.tokenize("w10 w11 w12 w13 w14");
  const std::vector<TokenId> target{10, 3, 50, 11};
  const std::vector<double> up{1.0, -0.5, 2.0, -1.0};

  auto make = [&](const std::vector<double>& v) {
    EncoderInput in;
    in.append(EmbeddingView{v, 3, 8}).append(doc.subword_ids).append(EmbeddingView{v, 3, 8});
    return in;
  };
  const auto fb = b.logprobs_vjp(make(block), target, up);
  REQUIRE(fb.block_grads.size() == 2);
  const double h = 1e-5;
  for (std::size_t k = 0; k < block.size(); ++k) {
    auto plus = block, minus = block;
    plus[k] += h;
    minus[k] -= h;
    const auto lp = b.logprobs(make(plus), target);
    const auto lm = b.logprobs(make(minus), target);
    double fd = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) fd += up[i] * (lp[i] - lm[i]) / (2 * h);
    CHECK(fb.block_grads[0][k] + fb.block_grads[1][k] == doctest::Approx(fd).epsilon(1e-6));
  }
  CHECK(fb.logprobs == b.logprobs(make(block), target));
}

TEST_CASE("dimension mismatch on injected blocks") {
  const auto b = small_embedding();
  const std::vector<double> v(5, 0.0);
  EncoderInput in;
  in.append(EmbeddingView{v, 1, 5});
  const std::vector<TokenId> t{3};
  CHECK(code_of([&] { b.logprobs(in, t); }) == ErrorCode::kDimension);
}

TEST_CASE("registry builds toy backends and rejects unknown keys") {
  const auto ctx = default_backend_context(13);
  const auto names = registered_backends();
  CHECK(std::find(names.begin(), names.end(), "toy-copy") != names.end());
  CHECK(std::find(names.begin(), names.end(), "toy-embedding") != names.end());

  const auto b = make_backend("toy-copy", {{"copy_mass", 0.3}, {"vocab_size", 100}}, ctx);
  CHECK(b->capabilities().vocab_size == 100);
  CHECK_FALSE(b->capabilities().supports_embedding_injection);

  const auto e = make_backend("toy-embedding", nlohmann::json::object(), ctx);
  CHECK(e->capabilities().supports_gradients);
  CHECK(e->capabilities().embedding_dim == 32);

  try {
    make_backend("toy-copy", {{"lambda", 0.3}}, ctx);
    FAIL("expected ConfigError");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kConfig);
    CHECK(std::string(err.what()).find("backend.params.lambda") != std::string::npos);
  }
  CHECK(code_of([&] { make_backend("bart-large", {}, ctx); }) == ErrorCode::kConfig);

  const auto s1 = make_backend("toy-embedding", {}, BackendContext{1, ""});
  const auto s2 = make_backend("toy-embedding", {}, BackendContext{2, ""});
  CHECK(s1->parameter_checksum() != s2->parameter_checksum());
}
