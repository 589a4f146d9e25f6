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
#include <string>
#include <string_view>
#include <vector>

namespace prefdiff::text {

/// Splits on ASCII whitespace; empty fields are dropped.
std::vector<std::string> split_words(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool is_edge_punct(char c);

/// A whitespace word split into leading punctuation, core, and trailing
/// punctuation. `lead + core + trail` is the original word.
struct WordParts {
  std::string lead;
  std::string core;
  std::string trail;
};

WordParts split_edges(std::string_view word);

std::string to_lower(std::string_view s);

/// 64-bit FNV-1a. Stable across platforms, used for cache keys and
/// parameter checksums.
std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a_bytes(const void* data, std::size_t size,
                          std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t value);

}  // namespace prefdiff::text
