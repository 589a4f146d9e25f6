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

#include "prefdiff/evaldata/dataset.h"

#include <fstream>
#include <set>

#include "prefdiff/common/error.h"
#include "prefdiff/common/text.h"

namespace prefdiff {

std::size_t AnnotatedExample::summary_word_count() const {
  return text::split_words(summary).size();
}

std::string split_of(const AnnotatedExample& ex) {
  return ex.source_system.value_or("all");
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> k{"id",          "document",      "summary",
                                       "source_system", "word_labels", "summary_label",
                                       "category_labels"};
  return k;
}

double summary_label_from(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_boolean()) return v.get<bool>() ? 1.0 : 0.0;
  if (v.is_array() && !v.empty()) {
    double sum = 0.0;
    for (const auto& x : v) sum += x.get<double>();
    return sum / static_cast<double>(v.size());
  }
  throw std::invalid_argument("summary_label must be a number or a non-empty array of numbers");
}

std::vector<std::string> category_labels_from(const nlohmann::json& v) {
  if (!v.is_array()) throw std::invalid_argument("category_labels must be an array");
  if (v.empty() || v.front().is_string()) return v.get<std::vector<std::string>>();
  // One list per annotator: keep a category when a strict majority lists it.
  std::map<std::string, std::size_t> votes;
  for (const auto& annotator : v) {
    std::set<std::string> once;
    for (const auto& c : annotator) once.insert(c.get<std::string>());
    for (const auto& c : once) ++votes[c];
  }
  std::vector<std::string> out;
  for (const auto& [c, n] : votes) {
    if (2 * n > v.size()) out.push_back(c);
  }
  return out;
}

}  // namespace

AnnotatedExample example_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known_keys().count(key)) throw std::invalid_argument("unknown field '" + key + "'");
  }
  AnnotatedExample ex;
  ex.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
  ex.document = j.at("document").get<std::string>();
  ex.summary = j.at("summary").get<std::string>();
  if (j.contains("source_system") && !j["source_system"].is_null()) {
    ex.source_system = j["source_system"].get<std::string>();
  }
  if (j.contains("word_labels") && !j["word_labels"].is_null()) {
    auto labels = j["word_labels"].get<std::vector<int>>();
    for (int l : labels) {
      if (l != 0 && l != 1) throw std::invalid_argument("word_labels must be 0 or 1");
    }
    ex.word_labels = std::move(labels);
  }
  if (j.contains("summary_label") && !j["summary_label"].is_null()) {
    ex.summary_label = summary_label_from(j["summary_label"]);
  }
  if (j.contains("category_labels") && !j["category_labels"].is_null()) {
    ex.category_labels = category_labels_from(j["category_labels"]);
  }
  return ex;
}

nlohmann::json example_to_json(const AnnotatedExample& ex) {
  nlohmann::json j;
  j["id"] = ex.id;
  j["document"] = ex.document;
  j["summary"] = ex.summary;
  if (ex.source_system) j["source_system"] = *ex.source_system;
  if (ex.word_labels) j["word_labels"] = *ex.word_labels;
  if (ex.summary_label) j["summary_label"] = *ex.summary_label;
  if (ex.category_labels) j["category_labels"] = *ex.category_labels;
  return j;
}

Dataset parse_dataset(std::istream& in, const std::string& source, bool require_word_labels) {
  Dataset ds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    AnnotatedExample ex;
    try {
      ex = example_from_json(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      raise(ErrorCode::kParse, where + ": " + e.what());
    }
    if (!ex.word_labels && !ex.summary_label && !ex.category_labels) {
      raise(ErrorCode::kParse, where + ": record carries no labels");
    }
    if (require_word_labels && !ex.word_labels) {
      raise(ErrorCode::kParse, where + ": word_labels required");
    }
    if (ex.word_labels && ex.word_labels->size() != ex.summary_word_count()) {
      raise(ErrorCode::kAlignment,
            where + ": " + std::to_string(ex.word_labels->size()) + " word labels for " +
                std::to_string(ex.summary_word_count()) + " summary words");
    }
    ds.examples.push_back(std::move(ex));
  }
  if (ds.examples.empty()) ds.warnings.push_back(source + ": dataset is empty");
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, bool require_word_labels) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kIo, "cannot open dataset " + path.string());
  return parse_dataset(in, path.string(), require_word_labels);
}

Dataset load_token_dataset(const std::filesystem::path& path) {
  return load_dataset(path, true);
}

void save_dataset(const std::filesystem::path& path,
                  const std::vector<AnnotatedExample>& examples) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::kIo, "cannot write dataset " + path.string());
  for (const auto& ex : examples) out << example_to_json(ex).dump() << '\n';
}

}  // namespace prefdiff
