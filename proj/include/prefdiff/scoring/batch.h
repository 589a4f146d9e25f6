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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prefdiff/common/error.h"
#include "prefdiff/scoring/scoring.h"

namespace prefdiff {

struct PairRecord {
  std::string id;
  std::string document;
  std::string summary;
};

struct PairFailure {
  ErrorCode code;
  std::string message;
};

struct PairResult {
  std::string id;
  std::optional<TokenScoreSeq> scores;
  double summary_score = 0.0;
  std::optional<PairFailure> failure;

  bool ok() const { return scores.has_value(); }
};

/// Scores pairs on `workers` threads. Results come back in input order; a
/// failing pair yields a PairFailure carrying its id instead of aborting the
/// batch. Calls into a backend that is not thread safe are serialized.
std::vector<PairResult> score_batch(const PairScorer& scorer, std::span<const PairRecord> pairs,
                                    std::size_t workers = 1);

}  // namespace prefdiff
