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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace prefdiff {

/// One document/summary pair with whatever annotation the source provides.
/// word_labels use 1 for an inconsistent word.
struct AnnotatedExample {
  std::string id;
  std::string document;
  std::string summary;
  std::optional<std::string> source_system;
  std::optional<std::vector<int>> word_labels;
  std::optional<double> summary_label;
  std::optional<std::vector<std::string>> category_labels;

  std::size_t summary_word_count() const;
  bool operator==(const AnnotatedExample&) const = default;
};

struct Dataset {
  std::vector<AnnotatedExample> examples;
  std::vector<std::string> warnings;
};

/// Canonical JSONL, one object per line:
///   {"id", "document", "summary", "source_system"?, "word_labels"?,
///    "summary_label"?, "category_labels"?}
/// Import normalization: an array-valued summary_label (one rating per
/// annotator) is averaged; an array of arrays in category_labels is reduced
/// by majority vote. Errors carry `source:line`.
Dataset parse_dataset(std::istream& in, const std::string& source, bool require_word_labels);
Dataset load_dataset(const std::filesystem::path& path, bool require_word_labels = false);
Dataset load_token_dataset(const std::filesystem::path& path);

AnnotatedExample example_from_json(const nlohmann::json& j);
nlohmann::json example_to_json(const AnnotatedExample& ex);
void save_dataset(const std::filesystem::path& path, const std::vector<AnnotatedExample>& examples);

/// Split key used for per-split metrics ("all" when source_system is absent).
std::string split_of(const AnnotatedExample& ex);

}  // namespace prefdiff
