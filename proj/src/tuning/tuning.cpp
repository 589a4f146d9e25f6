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

#include "prefdiff/tuning/tuning.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>

#include "prefdiff/common/error.h"
#include "prefdiff/evaldata/metrics.h"
#include "prefdiff/scoring/threshold.h"

namespace prefdiff {

double tuning_loss(std::span<const double> word_pdiff, std::span<const int> labels,
                   bool normalized) {
  if (word_pdiff.size() != labels.size()) {
    raise(ErrorCode::kShape, "tuning_loss: " + std::to_string(word_pdiff.size()) +
                                 " scores vs " + std::to_string(labels.size()) + " labels");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    loss += labels[i] ? -word_pdiff[i] : word_pdiff[i];
  }
  if (normalized && !labels.empty()) loss /= static_cast<double>(labels.size());
  return loss;
}

void TuningConfig::validate() const {
  if (!(learning_rate > 0.0)) raise(ErrorCode::kConfig, "tuning.learning_rate must be > 0");
  if (epochs == 0) raise(ErrorCode::kConfig, "tuning.epochs must be > 0");
  if (batch_size == 0) raise(ErrorCode::kConfig, "tuning.batch_size must be > 0");
  if (prompt_length == 0 || prompt_length > PromptVector::kMaxLength) {
    raise(ErrorCode::kConfig, "tuning.prompt_length must be in 1..512");
  }
  if (weight_decay < 0.0) raise(ErrorCode::kConfig, "tuning.weight_decay must be >= 0");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1) || !(eps > 0)) {
    raise(ErrorCode::kConfig, "tuning: invalid Adam coefficients");
  }
  if (target_rate && !(*target_rate > 0.0 && *target_rate < 1.0)) {
    raise(ErrorCode::kConfig, "tuning.target_rate must be in (0, 1)");
  }
}

namespace {

void require_gradients(const Backend& backend) {
  const auto& caps = backend.capabilities();
  if (!caps.supports_embedding_injection || !caps.supports_gradients) {
    raise(ErrorCode::kCapability,
          "backend '" + backend.name() + "' cannot take gradients w.r.t. injected embeddings");
  }
}

const std::vector<int>& labels_of(const AnnotatedExample& ex) {
  if (!ex.word_labels) raise(ErrorCode::kConfig, "example '" + ex.id + "' has no word_labels");
  return *ex.word_labels;
}

// d loss / d subword_pdiff for one pair.
std::vector<double> subword_upstream(const TokenScoreSeq& s, const std::vector<int>& labels,
                                     Reduction reduction) {
  const std::size_t words = s.word_pdiff.size();
  std::vector<std::size_t> counts(words, 0);
  for (auto w : s.word_map) ++counts[w];
  std::vector<bool> taken(words, false);
  std::vector<double> up(s.subword_pdiff.size(), 0.0);
  for (std::size_t i = 0; i < up.size(); ++i) {
    const std::size_t w = s.word_map[i];
    const double sign = labels[w] ? -1.0 : 1.0;
    switch (reduction) {
      case Reduction::kMean: up[i] = sign / static_cast<double>(counts[w]); break;
      case Reduction::kSum: up[i] = sign; break;
      case Reduction::kMax:
        // first subword attaining the max carries the gradient
        if (!taken[w] && s.subword_pdiff[i] == s.word_pdiff[w]) {
          up[i] = sign;
          taken[w] = true;
        }
        break;
    }
  }
  return up;
}

}  // namespace

TuningObjective::TuningObjective(const Backend& backend, ScoringConfig config)
    : backend_(backend), config_(std::move(config)) {
  config_.prompt_vector.reset();
  config_.validate();
}

double TuningObjective::loss(const PromptVector& vector, const AnnotatedExample& ex) const {
  ScoringConfig cfg = config_;
  cfg.prompt_vector = std::shared_ptr<const PromptVector>(&vector, [](const PromptVector*) {});
  const PromptSpec spec{config_.prompt_variant, {}, {}};
  const auto scores = score_pair(ex.document, ex.summary, spec, cfg, backend_);
  return tuning_loss(scores.word_pdiff, labels_of(ex));
}

LossAndGrad TuningObjective::loss_and_grad(const PromptVector& vector,
                                           const AnnotatedExample& ex) const {
  require_gradients(backend_);
  const auto& labels = labels_of(ex);
  ScoringConfig cfg = config_;
  cfg.prompt_vector = std::shared_ptr<const PromptVector>(&vector, [](const PromptVector*) {});
  const PromptSpec spec{config_.prompt_variant, {}, {}};
  const std::string prompt = build_prompt(ex.summary, spec).text;
  const PassInputs in = build_pass_inputs(ex.document, ex.summary, prompt, cfg, backend_);
  const auto& target = in.summary.subword_ids;

  // Forward first: the word scores fix the max-reduction routing.
  TokenScoreSeq s;
  s.word_map = in.summary.word_map;
  {
    const auto p1 = backend_.logprobs(in.document_only, target);
    const auto p2 = backend_.logprobs(in.with_prompt, target);
    s.subword_pdiff.resize(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) s.subword_pdiff[i] = p2[i] - p1[i];
  }
  s.word_pdiff = reduce_subwords(s.subword_pdiff, s.word_map, config_.subword_reduction);
  if (s.word_pdiff.size() != labels.size()) {
    raise(ErrorCode::kAlignment, "example '" + ex.id + "': label count differs from word count");
  }

  const auto up = subword_upstream(s, labels, config_.subword_reduction);
  std::vector<double> neg(up.size());
  for (std::size_t i = 0; i < up.size(); ++i) neg[i] = -up[i];

  LossAndGrad out;
  out.loss = tuning_loss(s.word_pdiff, labels);
  out.grad.assign(vector.parameter_count(), 0.0);
  const auto accumulate = [&](const ForwardBackward& fb) {
    for (const auto& g : fb.block_grads) {
      for (std::size_t k = 0; k < out.grad.size(); ++k) out.grad[k] += g[k];
    }
  };
  accumulate(backend_.logprobs_vjp(in.with_prompt, target, up));
  accumulate(backend_.logprobs_vjp(in.document_only, target, neg));
  return out;
}

double corpus_f1_at_rate(std::span<const AnnotatedExample> examples, const Backend& backend,
                         const ScoringConfig& scoring, double target_rate) {
  std::vector<TokenScoreSeq> scores;
  std::vector<std::vector<int>> golds;
  scores.reserve(examples.size());
  const PromptSpec spec{scoring.prompt_variant, {}, {}};
  for (const auto& ex : examples) {
    scores.push_back(score_pair(ex.document, ex.summary, spec, scoring, backend));
    golds.push_back(labels_of(ex));
  }
  const double t = resolve_threshold(ThresholdPolicy::proportion(target_rate), scores);
  std::vector<std::vector<int>> preds;
  for (const auto& s : scores) {
    const auto b = apply_threshold(s, t);
    preds.emplace_back(b.begin(), b.end());
  }
  const std::vector<std::string> splits(examples.size(), "all");
  return token_f1(preds, golds, splits).corpus_f1;
}

TuningResult train_prompt_vector(std::span<const AnnotatedExample> train,
                                 std::span<const AnnotatedExample> valid,
                                 const TuningConfig& config, const Backend& backend,
                                 ScoringConfig scoring, std::optional<PromptVector> initial) {
  config.validate();
  require_gradients(backend);
  if (train.empty()) raise(ErrorCode::kConfig, "training set is empty");
  if (valid.empty()) raise(ErrorCode::kConfig, "validation set is empty");
  std::size_t positives = 0, words = 0;
  for (const auto& ex : train) {
    const auto& l = labels_of(ex);
    positives += static_cast<std::size_t>(std::count(l.begin(), l.end(), 1));
    words += l.size();
  }
  for (const auto& ex : valid) labels_of(ex);

  TuningResult result;
  result.target_rate = config.target_rate.value_or(
      words ? static_cast<double>(positives) / static_cast<double>(words) : 0.0);
  if (!(result.target_rate > 0.0 && result.target_rate < 1.0)) {
    raise(ErrorCode::kConfig, "training labels must contain both classes");
  }

  PromptVector v = initial ? std::move(*initial)
                           : PromptVector::from_token_embeddings(backend, config.prompt_length,
                                                                 config.seed);
  v.validate();
  if (v.dim != backend.capabilities().embedding_dim) {
    raise(ErrorCode::kDimension, "prompt vector width " + std::to_string(v.dim) +
                                     " differs from backend width " +
                                     std::to_string(backend.capabilities().embedding_dim));
  }
  scoring.prompt_vector.reset();
  const TuningObjective objective(backend, scoring);

  const auto valid_f1 = [&](const PromptVector& pv) {
    ScoringConfig cfg = scoring;
    cfg.prompt_vector = std::shared_ptr<const PromptVector>(&pv, [](const PromptVector*) {});
    return corpus_f1_at_rate(valid, backend, cfg, result.target_rate);
  };

  result.vector = v;
  result.best_valid_f1 = valid_f1(v);
  result.trace.push_back({0, std::nullopt, result.best_valid_f1});

  const std::size_t n = v.parameter_count();
  std::vector<double> m(n, 0.0), s2(n, 0.0);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::size_t step = 0, since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      std::vector<double> grad(n, 0.0);
      const std::size_t end = std::min(order.size(), b + config.batch_size);
      for (std::size_t i = b; i < end; ++i) {
        const auto& ex = train[order[i]];
        auto lg = objective.loss_and_grad(v, ex);
        double scale = 1.0;
        if (config.normalize_loss) scale = 1.0 / static_cast<double>(labels_of(ex).size());
        epoch_loss += lg.loss * scale;
        for (std::size_t k = 0; k < n; ++k) grad[k] += lg.grad[k] * scale;
      }
      ++step;
      const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      for (std::size_t k = 0; k < n; ++k) {
        v.values[k] -= config.learning_rate * config.weight_decay * v.values[k];
        m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * grad[k];
        s2[k] = config.beta2 * s2[k] + (1.0 - config.beta2) * grad[k] * grad[k];
        v.values[k] -= config.learning_rate * (m[k] / c1) / (std::sqrt(s2[k] / c2) + config.eps);
      }
    }
    const double f1 = valid_f1(v);
    result.trace.push_back({epoch, epoch_loss, f1});
    if (f1 > result.best_valid_f1) {
      result.best_valid_f1 = f1;
      result.best_epoch = epoch;
      result.vector = v;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  return result;
}

namespace {

constexpr char kMagic[4] = {'P', 'V', 'E', 'C'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host expected");
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& where) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    raise(ErrorCode::kParse, where + ": truncated checkpoint");
  }
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const PromptVector& vector,
                     const std::string& fingerprint) {
  vector.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::kIo, "cannot write " + path.string());
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, vector.length);
  put<std::uint64_t>(out, vector.dim);
  put<std::uint64_t>(out, vector.init_seed);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(fingerprint.size()));
  out.write(fingerprint.data(), static_cast<std::streamsize>(fingerprint.size()));
  for (double x : vector.values) put<float>(out, static_cast<float>(x));
  if (!out) raise(ErrorCode::kIo, "write failed: " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::kIo, "cannot open " + path.string());
  const std::string where = path.string();
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    raise(ErrorCode::kParse, where + ": not a prompt-vector checkpoint");
  }
  if (get<std::uint32_t>(in, where) != kVersion) {
    raise(ErrorCode::kParse, where + ": unsupported checkpoint version");
  }
  Checkpoint ck;
  ck.vector.length = get<std::uint64_t>(in, where);
  ck.vector.dim = get<std::uint64_t>(in, where);
  ck.vector.init_seed = get<std::uint64_t>(in, where);
  if (ck.vector.length > PromptVector::kMaxLength || ck.vector.dim > (1u << 20)) {
    raise(ErrorCode::kParse, where + ": implausible vector shape");
  }
  const auto fp_size = get<std::uint32_t>(in, where);
  if (fp_size > (1u << 16)) raise(ErrorCode::kParse, where + ": implausible fingerprint size");
  ck.backend_fingerprint.resize(fp_size);
  if (!in.read(ck.backend_fingerprint.data(), fp_size)) {
    raise(ErrorCode::kParse, where + ": truncated checkpoint");
  }
  ck.vector.values.resize(ck.vector.length * ck.vector.dim);
  for (auto& x : ck.vector.values) x = static_cast<double>(get<float>(in, where));
  if (in.peek() != std::char_traits<char>::eof()) {
    raise(ErrorCode::kParse, where + ": trailing bytes after checkpoint");
  }
  ck.vector.validate();
  return ck;
}

PromptVector load_checkpoint(const std::filesystem::path& path, const Backend& backend,
                             bool force) {
  Checkpoint ck = read_checkpoint(path);
  if (!force && ck.backend_fingerprint != backend.fingerprint()) {
    raise(ErrorCode::kConfig, path.string() + ": checkpoint was trained on backend '" +
                                  ck.backend_fingerprint + "', current backend is '" +
                                  backend.fingerprint() + "' (force to override)");
  }
  if (ck.vector.dim != backend.capabilities().embedding_dim) {
    raise(ErrorCode::kDimension, path.string() + ": checkpoint width " +
                                     std::to_string(ck.vector.dim) + " vs backend width " +
                                     std::to_string(backend.capabilities().embedding_dim));
  }
  return std::move(ck.vector);
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::kIo, "cannot write " + path.string());
  out << "epoch,loss,valid_f1\n" << std::setprecision(10);
  for (const auto& r : trace) {
    out << r.epoch << ',';
    if (r.loss) out << *r.loss;
    out << ',' << r.valid_f1 << '\n';
  }
}

}  // namespace prefdiff
