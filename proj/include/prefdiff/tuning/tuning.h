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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prefdiff/evaldata/dataset.h"
#include "prefdiff/scoring/scoring.h"
#include "prefdiff/tuning/prompt_vector.h"

namespace prefdiff {

/// sum_i word_pdiff[i] * sign_i, sign +1 for a consistent word (label 0) and
/// -1 for an inconsistent one. `normalized` divides by the word count.
double tuning_loss(std::span<const double> word_pdiff, std::span<const int> labels,
                   bool normalized = false);

struct TuningConfig {
  double learning_rate = 1e-3;
  std::size_t epochs = 50;
  std::size_t batch_size = 8;
  std::size_t prompt_length = 5;
  std::uint64_t seed = 13;
  std::size_t patience = 5;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  bool normalize_loss = false;
  // Proportion-mode rate for validation F1; the training positive rate when unset.
  std::optional<double> target_rate;

  void validate() const;
};

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;  // length x dim, row-major
};

/// Tuning loss of one labeled pair as a function of the prompt vector, using
/// the pair's prompt text (config.prompt_variant) and the scoring layout.
class TuningObjective {
 public:
  TuningObjective(const Backend& backend, ScoringConfig config);

  double loss(const PromptVector& vector, const AnnotatedExample& ex) const;
  LossAndGrad loss_and_grad(const PromptVector& vector, const AnnotatedExample& ex) const;

 private:
  const Backend& backend_;
  ScoringConfig config_;
};

struct EpochRecord {
  std::size_t epoch = 0;          // 0 is the initial vector
  std::optional<double> loss;     // summed training loss over the epoch
  double valid_f1 = 0.0;
};

struct TuningResult {
  PromptVector vector;
  std::size_t best_epoch = 0;
  double best_valid_f1 = 0.0;
  double target_rate = 0.0;
  std::vector<EpochRecord> trace;
};

/// Adam with decoupled weight decay over the prompt vector only. Returns the
/// vector with the best validation corpus F1 (proportion threshold).
/// `initial` resumes from a checkpoint with fresh optimizer state.
TuningResult train_prompt_vector(std::span<const AnnotatedExample> train,
                                 std::span<const AnnotatedExample> valid,
                                 const TuningConfig& config, const Backend& backend,
                                 ScoringConfig scoring = {},
                                 std::optional<PromptVector> initial = std::nullopt);

/// Corpus F1 of the pipeline on labeled examples with a proportion threshold.
double corpus_f1_at_rate(std::span<const AnnotatedExample> examples, const Backend& backend,
                         const ScoringConfig& scoring, double target_rate);

/// Binary checkpoint: "PVEC", u32 version, u64 length, u64 dim, u64 init_seed,
/// u32 fingerprint size, fingerprint bytes, length*dim float32 row-major.
/// Little-endian.
void save_checkpoint(const std::filesystem::path& path, const PromptVector& vector,
                     const std::string& backend_fingerprint);

struct Checkpoint {
  PromptVector vector;
  std::string backend_fingerprint;
};

Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Refuses (ConfigError) when the stored fingerprint differs from the
/// backend's, unless `force`.
PromptVector load_checkpoint(const std::filesystem::path& path, const Backend& backend,
                             bool force = false);

void write_trace_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& trace);

}  // namespace prefdiff
