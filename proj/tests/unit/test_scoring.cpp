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

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "prefdiff/backend/toy_copy_backend.h"
#include "prefdiff/backend/toy_embedding_backend.h"
#include "prefdiff/common/error.h"
#include "prefdiff/common/text.h"
#include "prefdiff/scoring/batch.h"
#include "prefdiff/scoring/scoring.h"
#include "prefdiff/scoring/threshold.h"

using namespace prefdiff;

namespace {

ToyCopyBackend copy_backend(double lambda, std::size_t vocab, std::size_t max_len = 4096) {
  ToyCopyBackend::Options o;
  o.model.copy_mass = lambda;
  o.model.vocab_size = vocab;
  o.max_encoder_length = max_len;
  return ToyCopyBackend(o);
}

TokenScoreSeq seq(std::vector<double> words) {
  TokenScoreSeq s;
  s.subword_pdiff = words;
  for (std::size_t i = 0; i < words.size(); ++i) s.word_map.push_back(i);
  s.weights.assign(words.size(), 1.0);
  s.word_pdiff = std::move(words);
  return s;
}

PromptSpec spec_of(PromptVariant v) {
  PromptSpec s;
  s.variant = v;
  return s;
}

}  // namespace

TEST_CASE("two-pass toy example") {
  auto b = copy_backend(0.5, 10);
  const auto s = score_pair("a b c", "a d", spec_of(PromptVariant::kBase), {}, b);
  REQUIRE(s.word_pdiff.size() == 2);
  const double a = std::log(0.5 / 4 + 0.05) - std::log(0.5 / 3 + 0.05);
  const double d = std::log(0.5 / 4 + 0.05) - std::log(0.05);
  CHECK(s.word_pdiff[0] == doctest::Approx(a).epsilon(1e-12));
  CHECK(s.word_pdiff[1] == doctest::Approx(d).epsilon(1e-12));
  CHECK(s.word_pdiff[0] == doctest::Approx(-0.2137).epsilon(1e-3));
  CHECK(s.word_pdiff[1] == doctest::Approx(1.2528).epsilon(1e-4));
  CHECK(summary_score(s) == doctest::Approx(-0.51955).epsilon(1e-4));
  CHECK(summary_score(s, SummaryAggregate::kSum) == doctest::Approx(-(a + d)).epsilon(1e-12));
}

TEST_CASE("variant none gives exactly zero on both toy backends") {
  auto c = copy_backend(0.4, 1000);
  const ToyEmbeddingBackend e({});
  ScoringConfig cfg;
  cfg.prompt_variant = PromptVariant::kNone;
  for (const Backend* b : {static_cast<const Backend*>(&c), static_cast<const Backend*>(&e)}) {
    const auto s = score_pair("w20 w21 w22 w23", "w20 w99 w1", spec_of(PromptVariant::kNone), cfg, *b);
    for (double v : s.subword_pdiff) CHECK(v == 0.0);
  }
}

TEST_CASE("absent summary words score above present ones on the copy backend") {
  auto b = copy_backend(0.6, 5000);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> doc, summary;
    std::set<std::string> in_doc;
    for (int i = 0; i < 15; ++i) {
      doc.push_back("d" + std::to_string(rng() % 40));
      in_doc.insert(doc.back());
    }
    for (int i = 0; i < 8; ++i) {
      summary.push_back(rng() % 2 ? doc[rng() % doc.size()] : "n" + std::to_string(rng() % 40));
    }
    const auto s = score_pair(text::join(doc, " "), text::join(summary, " "),
                              spec_of(PromptVariant::kBase), {}, b);
    double max_present = -INFINITY, min_absent = INFINITY;
    for (std::size_t i = 0; i < summary.size(); ++i) {
      if (in_doc.count(summary[i])) {
        max_present = std::max(max_present, s.word_pdiff[i]);
      } else {
        min_absent = std::min(min_absent, s.word_pdiff[i]);
      }
    }
    CHECK(min_absent > max_present);
  }
}

TEST_CASE("subword reduction") {
  const std::vector<double> one{1.0, -2.0, 0.5};
  const std::vector<std::size_t> ident{0, 1, 2};
  for (auto r : {Reduction::kMean, Reduction::kMax, Reduction::kSum}) {
    CHECK(reduce_subwords(one, ident, r) == one);
  }
  const std::vector<double> two{1.0, 3.0};
  const std::vector<std::size_t> same{0, 0};
  CHECK(reduce_subwords(two, same, Reduction::kMean)[0] == 2.0);
  CHECK(reduce_subwords(two, same, Reduction::kMax)[0] == 3.0);
  CHECK(reduce_subwords(two, same, Reduction::kSum)[0] == 4.0);
  CHECK_THROWS_AS(reduce_subwords(two, ident, Reduction::kMean), Error);
}

TEST_CASE("scores are reduced to words when pieces split words") {
  ToyCopyBackend::Options o;
  o.model.vocab_size = 1000;
  o.piece_chars = 2;
  ToyCopyBackend b(o);
  const auto s = score_pair("alpha beta", "alpha gamma.", spec_of(PromptVariant::kBase), {}, b);
  CHECK(s.word_pdiff.size() == 2);
  CHECK(s.subword_pdiff.size() > 2);
  s.validate();
}

TEST_CASE("fixed and proportion thresholds") {
  const auto s = seq({-1.0, 0.0, 2.0});
  const auto fixed = predict_inconsistent(s, ThresholdPolicy::fixed(1.0));
  CHECK(fixed == std::vector<bool>{false, false, true});

  const auto flat = seq({0.3, 0.3, 0.3, 0.3});
  const std::vector<TokenScoreSeq> corpus{flat};
  const auto p = predict_inconsistent(flat, ThresholdPolicy::proportion(0.5), corpus);
  CHECK(std::none_of(p.begin(), p.end(), [](bool x) { return x; }));

  CHECK_THROWS_AS(predict_inconsistent(s, ThresholdPolicy::proportion(0.2)), Error);
  CHECK_THROWS_AS(ThresholdPolicy::proportion(0.0).validate(), Error);
  CHECK_THROWS_AS(ThresholdPolicy::proportion(1.0).validate(), Error);

  // 10 distinct scores, rate 0.3 -> the top 3
  std::vector<double> ten;
  for (int i = 0; i < 10; ++i) ten.push_back(i);
  CHECK(proportion_threshold(ten, 0.3) == 6.0);
  CHECK(proportion_threshold(ten, 0.25) == 6.0);
}

TEST_CASE("proportion threshold labels at most ceil(rate * N) words") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<TokenScoreSeq> corpus;
    std::size_t n = 0;
    for (int k = 0; k < 1 + static_cast<int>(rng() % 5); ++k) {
      std::vector<double> w(1 + rng() % 7);
      for (auto& x : w) x = static_cast<double>(rng() % 6) - 2.0;  // many ties
      n += w.size();
      corpus.push_back(seq(w));
    }
    const double rate = 0.01 + 0.98 * std::uniform_real_distribution<double>()(rng);
    const double t = resolve_threshold(ThresholdPolicy::proportion(rate), corpus);
    std::size_t pos = 0, above_or_tied = 0;
    for (const auto& s : corpus) {
      for (bool b : apply_threshold(s, t)) pos += b;
      for (double v : s.word_pdiff) above_or_tied += v >= t;
    }
    CHECK(pos <= static_cast<std::size_t>(std::ceil(rate * n)));
    // only ties at t keep the count below the target
    CHECK(above_or_tied >= std::min(n, static_cast<std::size_t>(std::ceil(rate * n - 1e-9))));
  }
}

TEST_CASE("raising the fixed threshold never adds inconsistent labels") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> w(10);
    for (auto& x : w) x = nd(rng);
    const auto s = seq(w);
    const double lo = nd(rng);
    const double hi = lo + std::abs(nd(rng));
    const auto a = predict_inconsistent(s, ThresholdPolicy::fixed(lo));
    const auto b = predict_inconsistent(s, ThresholdPolicy::fixed(hi));
    for (std::size_t i = 0; i < w.size(); ++i) CHECK((!b[i] || a[i]));
  }
}

TEST_CASE("shifting every score keeps proportion labels and shifts summary scores") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  std::vector<TokenScoreSeq> corpus, shifted;
  for (int k = 0; k < 20; ++k) {
    std::vector<double> w(3 + rng() % 5);
    for (auto& x : w) x = nd(rng);
    corpus.push_back(seq(w));
    for (auto& x : w) x += 0.75;
    shifted.push_back(seq(w));
  }
  const auto policy = ThresholdPolicy::proportion(0.2);
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    CHECK(predict_inconsistent(corpus[k], policy, corpus) ==
          predict_inconsistent(shifted[k], policy, shifted));
    CHECK(summary_score(shifted[k]) == doctest::Approx(summary_score(corpus[k]) - 0.75));
  }
}

TEST_CASE("summary score weighting") {
  CHECK(summary_score(seq({0.0, 0.0})) == 0.0);
  auto s = seq({1.0, 3.0});
  s.weights = {1.0, 3.0};
  CHECK(summary_score(s) == doctest::Approx(-2.5));
  s.weights = {2.0, 6.0};
  CHECK(summary_score(s) == doctest::Approx(-2.5));
}

TEST_CASE("category scores") {
  auto b = copy_backend(0.5, 1000);
  const PairScorer scorer(b, {}, {});
  const std::string doc = "the city council met on monday";
  const std::string plain = "the council met";
  const double base = summary_score(scorer.score(doc, plain));
  CHECK(*scorer.category_score(doc, plain, Category::kEntE) == base);
  CHECK(*scorer.category_score(doc, plain, Category::kOutE) == base);
  CHECK_FALSE(scorer.category_score(doc, plain, Category::kCorefE).has_value());
  CHECK(scorer.category_score(doc, "they met", Category::kCorefE).has_value());

  // an entity absent from the document weighs double under EntE
  const std::string ent = "the council met Paris";
  const auto spec = scorer.prompt_spec(ent, PromptVariant::kEntity);
  REQUIRE(spec.entity_spans.size() == 1);
  const auto es = score_pair(doc, ent, spec, scorer.config(), b);
  CHECK(es.word_pdiff[3] > 0.0);
  const double ente = *scorer.category_score(doc, ent, Category::kEntE);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double w = i == 3 ? 2.0 : 1.0;
    num += w * es.word_pdiff[i];
    den += w;
  }
  CHECK(ente == doctest::Approx(-num / den).epsilon(1e-12));
  CHECK(ente < summary_score(es));

  CHECK(category_score(doc, plain, Category::kOutE, b) == base);
}

TEST_CASE("document truncation") {
  auto b = copy_backend(0.5, 1000, 6);
  ScoringConfig cfg;
  // base prompt "x y" + separator = 3 positions, 3 left for the document
  const auto head = build_pass_inputs("a b c d e", "x y", "x y", cfg, b);
  CHECK(head.truncated);
  CHECK(head.with_prompt.length() == 6);
  const auto s = score_pair_with_prompt("a b c d e", "a e", "a e", cfg, b);
  CHECK(s.truncated);
  // keep_head drops "e": the pass-1 source is {a, b, c}
  CHECK(s.word_pdiff[1] > 0.0);
  cfg.truncation = Truncation::kKeepTail;
  const auto tail = score_pair_with_prompt("a b c d e", "a e", "a e", cfg, b);
  CHECK(tail.word_pdiff[0] > 0.0);
  cfg.truncation = Truncation::kError;
  try {
    score_pair_with_prompt("a b c d e", "a e", "a e", cfg, b);
    FAIL("expected LengthExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLengthExceeded);
  }
  CHECK_FALSE(build_pass_inputs("a b", "x", "x", cfg, b).truncated);
}

TEST_CASE("batch scoring keeps order, reports failures per pair, and is worker independent") {
  auto b = copy_backend(0.5, 5000, 12);
  const PairScorer scorer(b, {}, {});
  std::vector<PairRecord> pairs;
  for (int i = 0; i < 40; ++i) {
    pairs.push_back({"p" + std::to_string(i), "d" + std::to_string(i % 7) + " x y z",
                     "d" + std::to_string(i % 5) + " y q" + std::to_string(i)});
  }
  pairs[5].summary = "";
  ScoringConfig strict;
  strict.truncation = Truncation::kError;
  const PairScorer strict_scorer(b, strict, {});
  pairs[9].document = "a b c d e f g h i j k l m n o";
  const auto one = score_batch(strict_scorer, pairs, 1);
  const auto four = score_batch(strict_scorer, pairs, 4);
  REQUIRE(one.size() == pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(one[i].id == pairs[i].id);
    CHECK(four[i].id == pairs[i].id);
    CHECK(one[i].ok() == four[i].ok());
    if (one[i].ok()) CHECK(one[i].scores->word_pdiff == four[i].scores->word_pdiff);
  }
  CHECK(one[5].failure->code == ErrorCode::kEmptyInput);
  CHECK(one[9].failure->code == ErrorCode::kLengthExceeded);
  CHECK(one[9].failure->message.find("p9") != std::string::npos);
  CHECK(score_batch(scorer, std::span<const PairRecord>{}, 3).empty());
}
