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

#include "prefdiff/cli/run_config.h"

#include <filesystem>
#include <fstream>
#include <set>

#include "prefdiff/common/error.h"

namespace prefdiff::cli {
namespace {

using nlohmann::json;

class Section {
 public:
  Section(const json& tree, std::string name) : name_(std::move(name)) {
    if (tree.is_null()) return;
    if (!tree.is_object()) raise(ErrorCode::kConfig, name_ + ": expected an object");
    node_ = &tree;
  }

  ~Section() = default;

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key) || (*node_)[key].is_null()) return;
    try {
      out = (*node_)[key].get<T>();
    } catch (const json::exception&) {
      raise(ErrorCode::kConfig, path(key) + ": wrong value type");
    }
  }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return nullptr;
    return &(*node_)[key];
  }

  void finish() const {
    if (!node_) return;
    for (auto it = node_->begin(); it != node_->end(); ++it) {
      if (!seen_.count(it.key())) raise(ErrorCode::kConfig, "unknown config key: " + path(it.key()));
    }
  }

  std::string path(const std::string& key) const {
    return name_.empty() ? key : name_ + "." + key;
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

const json& child(Section& parent, const std::string& key) {
  static const json kNull;
  const json* node = parent.raw(key);
  return node ? *node : kNull;
}

template <typename F>
auto with_key(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    raise(ErrorCode::kConfig, key + ": " + e.what());
  }
}

}  // namespace

void apply_override(json& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    raise(ErrorCode::kConfig, "--set expects section.key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &tree;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) raise(ErrorCode::kConfig, "--set: malformed key '" + key + "'");
    if (!node->is_object()) {
      if (!node->is_null()) raise(ErrorCode::kConfig, "--set: '" + key + "' crosses a non-object");
      *node = json::object();
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

RunConfig parse_run_config(const json& tree) {
  RunConfig rc;
  Section top(tree, "");
  top.get("seed", rc.seed);

  {
    Section s(child(top, "backend"), "backend");
    s.get("name", rc.backend_name);
    if (const json* p = s.raw("params"); p && !p->is_null()) {
      if (!p->is_object()) raise(ErrorCode::kConfig, "backend.params: expected an object");
      rc.backend_params = *p;
    }
    s.finish();
  }

  {
    Section s(child(top, "scoring"), "scoring");
    std::string variant = "base", reduction = "mean", truncation = "keep_head", aggregate = "mean";
    s.get("prompt_variant", variant);
    s.get("subword_reduction", reduction);
    s.get("truncation", truncation);
    s.get("summary_aggregate", aggregate);
    s.get("category_weight_multiplier", rc.scoring.category_weight_multiplier);
    s.get("use_separator", rc.scoring.use_separator);
    s.get("pass1_separator", rc.scoring.pass1_separator);
    s.get("prompt_vector", rc.prompt_vector_path);
    s.get("force_prompt_vector", rc.force_prompt_vector);
    s.finish();
    rc.scoring.prompt_variant = with_key("scoring.prompt_variant", [&] { return parse_variant(variant); });
    rc.scoring.subword_reduction =
        with_key("scoring.subword_reduction", [&] { return parse_reduction(reduction); });
    rc.scoring.truncation = with_key("scoring.truncation", [&] { return parse_truncation(truncation); });
    rc.scoring.summary_aggregate =
        with_key("scoring.summary_aggregate", [&] { return parse_aggregate(aggregate); });
    with_key("scoring", [&] { rc.scoring.validate(); });
  }

  {
    Section s(child(top, "threshold"), "threshold");
    std::string mode = "fixed";
    s.get("mode", mode);
    s.get("fixed_value", rc.threshold.fixed_value);
    s.get("target_rate", rc.threshold.target_rate);
    s.finish();
    if (mode == "fixed") {
      rc.threshold.mode = ThresholdPolicy::Mode::kFixed;
    } else if (mode == "proportion") {
      rc.threshold.mode = ThresholdPolicy::Mode::kProportion;
    } else {
      raise(ErrorCode::kConfig, "threshold.mode: expected fixed or proportion, got '" + mode + "'");
    }
    with_key("threshold", [&] { rc.threshold.validate(); });
  }

  {
    Section s(child(top, "facts"), "facts");
    s.get("ner_provider", rc.ner_provider);
    s.get("coref_provider", rc.coref_provider);
    s.get("cache_path", rc.fact_cache_path);
    s.finish();
  }

  {
    Section s(child(top, "tuning"), "tuning");
    auto& t = rc.tuning;
    s.get("learning_rate", t.learning_rate);
    s.get("epochs", t.epochs);
    s.get("batch_size", t.batch_size);
    s.get("prompt_length", t.prompt_length);
    s.get("patience", t.patience);
    s.get("weight_decay", t.weight_decay);
    s.get("normalize_loss", t.normalize_loss);
    double rate = 0.0;
    s.get("target_rate", rate);
    if (rate != 0.0) t.target_rate = rate;
    std::size_t limit = 0;
    s.get("train_limit", limit);
    if (limit) rc.train_limit = limit;
    s.finish();
    t.seed = rc.seed;
    with_key("tuning", [&] { t.validate(); });
  }

  {
    Section s(child(top, "io"), "io");
    s.get("input", rc.io.input);
    s.get("output", rc.io.output);
    s.get("dataset", rc.io.dataset);
    s.get("train", rc.io.train);
    s.get("valid", rc.io.valid);
    s.get("report_dir", rc.io.report_dir);
    s.get("checkpoint", rc.io.checkpoint);
    s.get("trace", rc.io.trace);
    s.get("scores", rc.io.scores);
    s.finish();
  }
  top.finish();
  return rc;
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kConfig, "cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::kConfig, path + ": " + e.what());
  }
}

void require_file(const std::string& key, const std::string& path) {
  if (path.empty()) raise(ErrorCode::kConfig, key + " is required");
  if (!std::filesystem::exists(path)) {
    raise(ErrorCode::kConfig, key + ": no such file '" + path + "'");
  }
}

}  // namespace prefdiff::cli
