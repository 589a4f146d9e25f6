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

#include "prefdiff/scoring/batch.h"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

namespace prefdiff {

std::vector<PairResult> score_batch(const PairScorer& scorer, std::span<const PairRecord> pairs,
                                    std::size_t workers) {
  std::vector<PairResult> results(pairs.size());
  const bool serialize = !scorer.backend().capabilities().thread_safe;
  std::mutex backend_mu;
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    for (std::size_t i = next++; i < pairs.size(); i = next++) {
      const PairRecord& rec = pairs[i];
      PairResult& out = results[i];
      out.id = rec.id;
      try {
        std::unique_lock<std::mutex> lock(backend_mu, std::defer_lock);
        if (serialize) lock.lock();
        out.scores = scorer.score(rec.document, rec.summary);
        out.summary_score = summary_score(*out.scores, scorer.config().summary_aggregate);
      } catch (const Error& e) {
        out.scores.reset();
        out.failure = PairFailure{e.code(), "pair '" + rec.id + "': " + e.what()};
      }
    }
  };

  workers = std::max<std::size_t>(1, std::min(workers, pairs.size()));
  if (workers == 1) {
    work();
    return results;
  }
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return results;
}

}  // namespace prefdiff
