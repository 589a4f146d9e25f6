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
#include <vector>

#include "prefdiff/evaldata/dataset.h"

namespace prefdiff {

/// Labeled document/summary pairs over the toy lexicon ("w<id>" words).
/// Documents draw distinct content ids; every summary word is either copied
/// from the document, a filler id (absent from the document, still labeled
/// consistent) or a content id absent from the document (labeled 1).
struct SyntheticOptions {
  std::size_t count = 100;
  std::size_t vocab_size = 512;
  std::size_t filler_count = 12;  // ids 1..filler_count
  std::size_t doc_min = 20;
  std::size_t doc_max = 60;       // exclusive
  std::size_t summary_min = 8;
  std::size_t summary_max = 16;   // exclusive
  double copy_rate = 0.55;
  double filler_rate = 0.25;      // the remainder is novel content
  std::uint64_t seed = 1;
};

std::vector<AnnotatedExample> make_synthetic_corpus(const SyntheticOptions& options);

}  // namespace prefdiff
