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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Oracles here are written from the formulas and share no code with
// the library.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "prefdiff/backend/toy_copy_backend.h"
#include "prefdiff/backend/toy_embedding_backend.h"
#include "prefdiff/evaldata/evaluate.h"
#include "prefdiff/evaldata/metrics.h"
#include "prefdiff/evaldata/synthetic.h"
#include "prefdiff/scoring/scoring.h"
#include "prefdiff/scoring/threshold.h"
#include "prefdiff/tuning/tuning.h"

using namespace prefdiff;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::string> words_of(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string random_text(std::mt19937_64& rng, std::size_t n, std::size_t pool) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    const auto k = rng() % pool;
    out += static_cast<char>('a' + k % 26);
    out += static_cast<char>('a' + (k / 26) % 26);
    out += "x";
  }
  return out;
}

PromptSpec spec_of(PromptVariant v) {
  PromptSpec s;
  s.variant = v;
  return s;
}

std::vector<AnnotatedExample> copy_task(std::size_t n, std::uint64_t seed, double copy_rate) {
  SyntheticOptions o;
  o.count = n;
  o.filler_count = 0;
  o.filler_rate = 0.0;
  o.copy_rate = copy_rate;
  o.seed = seed;
  return make_synthetic_corpus(o);
}

double positive_rate(const std::vector<AnnotatedExample>& data) {
  std::size_t pos = 0, n = 0;
  for (const auto& ex : data) {
    for (int l : *ex.word_labels) pos += l == 1;
    n += ex.word_labels->size();
  }
  return static_cast<double>(pos) / static_cast<double>(n);
}

// 1
Outcome empty_prompt_identity() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  ToyCopyBackend copy({});
  const ToyEmbeddingBackend emb({});
  ScoringConfig cfg;
  cfg.prompt_variant = PromptVariant::kNone;
  double worst = 0.0;
  std::size_t tokens = 0;
  for (int i = 0; i < 100; ++i) {
    const Backend& b = i % 2 ? static_cast<const Backend&>(emb) : copy;
    std::string doc, summary;
    if (i % 2) {
      doc = make_synthetic_corpus({.count = 1, .seed = static_cast<std::uint64_t>(i)})[0].document;
      summary = make_synthetic_corpus({.count = 1, .seed = static_cast<std::uint64_t>(i + 1000)})[0].summary;
    } else {
      doc = random_text(rng, 5 + rng() % 40, 200);
      summary = random_text(rng, 1 + rng() % 15, 200);
    }
    const auto s = score_pair(doc, summary, spec_of(PromptVariant::kNone), cfg, b);
    for (double v : s.subword_pdiff) worst = std::max(worst, std::abs(v));
    tokens += s.subword_pdiff.size();
  }
  const double secs = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "max |P_diff| = %.3g over %zu tokens of 100 pairs, %.2f s (limit 5 s)",
                worst, tokens, secs);
  return {worst <= 1e-12 && secs < 5.0, buf};
}

// 2: oracle from the closed form on surface strings
double oracle_logp(double lambda, double vocab, const std::set<std::string>& source,
                   const std::string& token) {
  const double copy = source.count(token) ? lambda / static_cast<double>(source.size()) : 0.0;
  return std::log(copy + (1.0 - lambda) / vocab);
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  std::size_t tokens = 0;
  for (int i = 0; i < 1000; ++i) {
    const double lambda = 0.02 + 0.96 * unit(rng);
    const std::size_t vocab = 1000 + rng() % 49000;
    ToyCopyBackend::Options o;
    o.model = {lambda, vocab};
    ToyCopyBackend b(o);
    const std::string doc = random_text(rng, 1 + rng() % 60, 150);
    const std::string summary = random_text(rng, 1 + rng() % 20, 150);
    const auto s = score_pair(doc, summary, spec_of(PromptVariant::kBase), {}, b);

    const auto dw = words_of(doc);
    const auto sw = words_of(summary);
    const std::set<std::string> s1(dw.begin(), dw.end());
    std::set<std::string> s2 = s1;
    s2.insert(sw.begin(), sw.end());
    if (s.subword_pdiff.size() != sw.size()) return {false, "token count differs from oracle"};
    for (std::size_t k = 0; k < sw.size(); ++k) {
      const double want = oracle_logp(lambda, static_cast<double>(vocab), s2, sw[k]) -
                          oracle_logp(lambda, static_cast<double>(vocab), s1, sw[k]);
      worst = std::max(worst, std::abs(want - s.subword_pdiff[k]));
      worst = std::max(worst, std::abs(want - s.word_pdiff[k]));
      ++tokens;
    }
  }
  const double secs = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "max |pipeline - oracle| = %.3g over %zu tokens of 1000 pairs, %.2f s (limit 30 s)",
                worst, tokens, secs);
  return {worst <= 1e-9 && secs < 30.0, buf};
}

// 3
Outcome toy_separation() {
  const auto t0 = Clock::now();
  ToyCopyBackend b({});
  const PairScorer scorer(b, {}, {});
  double worst = 1.0;
  std::size_t tokens = 0;
  const double copy_rates[] = {0.5, 0.7, 0.9};
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto data = copy_task(150, seed, copy_rates[seed % 3]);
    const auto ev = evaluate_tokens(data, scorer, ThresholdPolicy::proportion(positive_rate(data)));
    worst = std::min(worst, ev.f1.corpus_f1);
    tokens += ev.f1.corpus.tp + ev.f1.corpus.fp + ev.f1.corpus.fn + ev.f1.corpus.tn;
  }
  const double secs = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "min corpus F1 = %.12f over 6 corpora (%zu tokens), %.2f s (limit 30 s)",
                worst, tokens, secs);
  return {worst == 1.0 && secs < 30.0, buf};
}

// 4
Outcome gradient_check() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  for (int c = 0; c < 20; ++c) {
    ToyEmbeddingBackend::Options o;
    o.vocab_size = 64 + rng() % 192;
    o.dim = 4 + rng() % 13;
    o.sharpness = 1.0 + static_cast<double>(rng() % 40) / 10.0;
    o.filler_count = 1 + rng() % 10;
    o.seed = rng();
    o.piece_chars = rng() % 3;  // 0: whole words, 1-2: multi-piece words
    const ToyEmbeddingBackend b(o);

    ScoringConfig cfg;
    cfg.subword_reduction = static_cast<Reduction>(rng() % 3);
    cfg.pass1_separator = rng() % 2;
    cfg.use_separator = rng() % 4 != 0;
    const TuningObjective obj(b, cfg);

    SyntheticOptions so;
    so.count = 2;
    so.vocab_size = o.vocab_size;
    so.filler_count = o.filler_count;
    so.doc_min = 5;
    so.doc_max = 15;
    so.summary_min = 2;
    so.summary_max = 8;
    so.seed = rng();
    const auto data = make_synthetic_corpus(so);

    auto pv = PromptVector::from_token_embeddings(b, 1 + rng() % 6, rng());
    std::normal_distribution<double> nd(0.0, 0.1);
    for (auto& v : pv.values) v += nd(rng);

    const auto total_loss = [&](const PromptVector& p) {
      double l = 0.0;
      for (const auto& ex : data) l += obj.loss(p, ex);
      return l;
    };
    std::vector<double> grad(pv.parameter_count(), 0.0);
    for (const auto& ex : data) {
      const auto lg = obj.loss_and_grad(pv, ex);
      for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += lg.grad[k];
    }
    double diff2 = 0.0, ref2 = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k) {
      auto plus = pv, minus = pv;
      plus.values[k] += 1e-4;
      minus.values[k] -= 1e-4;
      const double fd = (total_loss(plus) - total_loss(minus)) / 2e-4;
      diff2 += (fd - grad[k]) * (fd - grad[k]);
      ref2 += fd * fd;
    }
    const double rel = std::sqrt(diff2) / std::max(std::sqrt(ref2), 1e-300);
    worst = std::max(worst, rel);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "max relative error ||g - fd|| / ||fd|| = %.3g over 20 configurations (limit 1e-3)",
                worst);
  return {worst < 1e-3, buf};
}

struct TuningRun {
  std::uint64_t checksum_before = 0;
  std::uint64_t checksum_after = 0;
  std::string fingerprint_before, fingerprint_after;
  std::size_t parameters = 0;
  std::size_t expected_parameters = 0;
  double zero_shot_f1 = 0.0;
  double tuned_f1 = 0.0;
  std::size_t epochs_run = 0;
  double seconds = 0.0;
};

TuningRun run_tuning() {
  const auto t0 = Clock::now();
  const ToyEmbeddingBackend b({});
  TuningRun r;
  r.checksum_before = b.parameter_checksum();
  r.fingerprint_before = b.fingerprint();

  const auto train = make_synthetic_corpus({.count = 300, .seed = 6001});
  const auto valid = make_synthetic_corpus({.count = 100, .seed = 6002});
  const auto test = make_synthetic_corpus({.count = 400, .seed = 6003});

  TuningConfig cfg;  // lr 1e-3, up to 50 epochs, batch 8, patience 5
  cfg.prompt_length = 5;
  cfg.seed = 6;
  const auto result = train_prompt_vector(train, valid, cfg, b);

  ScoringConfig untuned;
  ScoringConfig tuned;
  tuned.prompt_vector = std::make_shared<const PromptVector>(result.vector);
  r.zero_shot_f1 = corpus_f1_at_rate(test, b, untuned, result.target_rate);
  r.tuned_f1 = corpus_f1_at_rate(test, b, tuned, result.target_rate);

  r.checksum_after = b.parameter_checksum();
  r.fingerprint_after = b.fingerprint();
  r.parameters = result.vector.parameter_count();
  r.expected_parameters = cfg.prompt_length * b.capabilities().embedding_dim;
  r.epochs_run = result.trace.size() - 1;
  r.seconds = seconds_since(t0);
  return r;
}

// 5
Outcome frozen_backbone(const TuningRun& r) {
  char buf[220];
  std::snprintf(buf, sizeof buf,
                "checksum %016llx before, %016llx after; trainable parameters %zu = length x dim %zu",
                static_cast<unsigned long long>(r.checksum_before),
                static_cast<unsigned long long>(r.checksum_after), r.parameters,
                r.expected_parameters);
  return {r.checksum_before == r.checksum_after && r.fingerprint_before == r.fingerprint_after &&
              r.parameters == r.expected_parameters,
          buf};
}

// 6
Outcome tuning_efficacy(const TuningRun& r) {
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "held-out corpus F1 %.4f zero-shot -> %.4f tuned (gain %+.4f, need >= 0.05), %zu epochs, %.1f s (limit 300 s)",
                r.zero_shot_f1, r.tuned_f1, r.tuned_f1 - r.zero_shot_f1, r.epochs_run, r.seconds);
  return {r.tuned_f1 - r.zero_shot_f1 >= 0.05 && r.seconds < 300.0, buf};
}

// 7: naive metrics written from the definitions
double naive_f1(const std::vector<int>& p, const std::vector<int>& g) {
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    tp += p[i] && g[i];
    fp += p[i] && !g[i];
    fn += !p[i] && g[i];
  }
  const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  return prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
}

double naive_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double cov = 0, vx = 0, vy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cov += (x[i] - mx) * (y[i] - my);
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
  }
  return cov / std::sqrt(vx * vy);
}

Outcome metric_fidelity() {
  std::mt19937_64 rng(707);
  std::normal_distribution<double> nd;
  double worst_f1 = 0.0, worst_pool = 0.0, worst_r = 0.0;
  for (int c = 0; c < 1000; ++c) {
    const std::size_t examples = 1 + rng() % 12;
    const double p_rate = 0.05 + 0.9 * (rng() % 100) / 100.0;
    std::vector<std::vector<int>> preds, golds;
    std::vector<std::string> splits;
    std::map<std::string, std::pair<std::vector<int>, std::vector<int>>> by_split;
    std::vector<int> all_p, all_g;
    for (std::size_t e = 0; e < examples; ++e) {
      const std::size_t n = 1 + rng() % 15;
      std::vector<int> p(n), g(n);
      for (std::size_t i = 0; i < n; ++i) {
        p[i] = (rng() % 1000) < p_rate * 1000;
        g[i] = (rng() % 1000) < p_rate * 1000;
      }
      const std::string split = "s" + std::to_string(rng() % 4);
      auto& bucket = by_split[split];
      bucket.first.insert(bucket.first.end(), p.begin(), p.end());
      bucket.second.insert(bucket.second.end(), g.begin(), g.end());
      all_p.insert(all_p.end(), p.begin(), p.end());
      all_g.insert(all_g.end(), g.begin(), g.end());
      preds.push_back(p);
      golds.push_back(g);
      splits.push_back(split);
    }
    const auto r = token_f1(preds, golds, splits);
    worst_f1 = std::max(worst_f1, std::abs(r.corpus_f1 - naive_f1(all_p, all_g)));
    double avg = 0.0;
    for (const auto& [split, pg] : by_split) {
      const double want = naive_f1(pg.first, pg.second);
      worst_f1 = std::max(worst_f1, std::abs(r.per_split_f1.at(split) - want));
      avg += want;
    }
    worst_f1 = std::max(worst_f1, std::abs(r.average_split_f1 - avg / by_split.size()));
    Confusion pooled;
    for (const auto& [_, conf] : r.per_split) pooled += conf;
    worst_pool = std::max(worst_pool, std::abs(pooled.f1() - r.corpus_f1));

    const std::size_t n = 3 + rng() % 40;
    std::vector<double> x(n), y(n);
    const double rho = nd(rng);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = nd(rng) * 3 + 1;
      y[i] = rho * x[i] + nd(rng);
    }
    worst_r = std::max(worst_r, std::abs(pearson(x, y) - naive_pearson(x, y)));
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "1000 cases: max |F1 - naive| = %.3g, |corpus - pooled| = %.3g, |pearson - naive| = %.3g (limit 1e-9)",
                worst_f1, worst_pool, worst_r);
  return {worst_f1 <= 1e-9 && worst_pool <= 1e-9 && worst_r <= 1e-9, buf};
}

// 8
Outcome histogram_ordering() {
  ToyCopyBackend b({});
  const PairScorer scorer(b, {}, {});
  double min_gap = INFINITY;
  double mf = 0, mu = 0;
  for (std::uint64_t seed = 11; seed <= 15; ++seed) {
    const auto data = copy_task(100, seed, 0.6);
    const auto ev = evaluate_tokens(data, scorer, ThresholdPolicy::fixed(0.0));
    if (!ev.histogram) return {false, "histogram missing a class"};
    const double gap = ev.histogram->mean_unfactual - ev.histogram->mean_factual;
    if (gap < min_gap) {
      min_gap = gap;
      mf = ev.histogram->mean_factual;
      mu = ev.histogram->mean_unfactual;
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "5 toy corpora: smallest gap has mean normalized score unfactual %.4f > factual %.4f",
                mu, mf);
  return {min_gap > 0.0, buf};
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  };
  const auto guarded = [&](int id, const char* name, const std::function<Outcome()>& f) {
    try {
      report(id, name, f());
    } catch (const std::exception& e) {
      report(id, name, {false, std::string("exception: ") + e.what()});
    }
  };

  guarded(1, "empty-prompt identity", empty_prompt_identity);
  guarded(2, "oracle equivalence", oracle_equivalence);
  guarded(3, "toy separation", toy_separation);
  guarded(4, "gradient check", gradient_check);
  std::optional<TuningRun> run;
  std::string tuning_error;
  try {
    run = run_tuning();
  } catch (const std::exception& e) {
    tuning_error = e.what();
  }
  guarded(5, "frozen backbone", [&] {
    return run ? frozen_backbone(*run) : Outcome{false, "tuning run failed: " + tuning_error};
  });
  guarded(6, "tuning efficacy", [&] {
    return run ? tuning_efficacy(*run) : Outcome{false, "tuning run failed: " + tuning_error};
  });
  guarded(7, "metric fidelity", metric_fidelity);
  guarded(8, "histogram ordering", histogram_ordering);

  std::printf("%d of 8 acceptance criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
