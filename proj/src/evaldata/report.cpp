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

#include "prefdiff/evaldata/report.h"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "prefdiff/common/error.h"

namespace prefdiff {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string cell(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

nlohmann::json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json row_json(const CategoryRow& r) {
  return {{"overall", opt_json(r.overall)},
          {"category", opt_json(r.category)},
          {"oute", opt_json(r.oute)}};
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) raise(ErrorCode::kIo, "cannot write " + p.string());
  return out;
}

}  // namespace

void EvaluationReport::add_tokens(const TokenEvaluation& ev) {
  per_split_f1 = ev.f1.per_split_f1;
  average_split_f1 = ev.f1.average_split_f1;
  corpus_f1 = ev.f1.corpus_f1;
  threshold_used = ev.threshold;
  predicted_positive_rate = ev.predicted_positive_rate;
  histogram = ev.histogram;
  truncated_pairs = 0;
  for (const auto& s : ev.scores) truncated_pairs += s.truncated ? 1 : 0;
  for (const auto& split : ev.f1.degenerate_splits) {
    notes.push_back("split '" + split + "' has no predicted and no gold positives; F1 set to 0");
  }
  if (!histogram) notes.push_back("histogram skipped: one class has no tokens");
}

void EvaluationReport::add_category(const CategoryEvaluation& ev) {
  categories[std::string(category_name(ev.category))] = ev;
  for (const auto& n : ev.notes) notes.push_back(std::string(category_name(ev.category)) + " " + n);
}

nlohmann::json report_to_json(const EvaluationReport& r) {
  nlohmann::json j = nlohmann::json::object();
  if (r.corpus_f1) {
    j["per_split_f1"] = r.per_split_f1;
    j["average_split_f1"] = *r.average_split_f1;
    j["corpus_f1"] = *r.corpus_f1;
    j["threshold_used"] = opt_json(r.threshold_used);
    j["predicted_positive_rate"] = opt_json(r.predicted_positive_rate);
  }
  if (!r.pearson.empty()) j["pearson"] = r.pearson;
  if (!r.categories.empty()) {
    nlohmann::json cats = nlohmann::json::object();
    for (const auto& [name, c] : r.categories) {
      cats[name] = {{"pearson", c.pearson},
                    {"retained", c.retained},
                    {"excluded", c.excluded},
                    {"base", row_json(c.base)},
                    {"variant", row_json(c.variant)}};
    }
    j["category_pearson"] = cats;
  }
  if (r.histogram) {
    const auto& h = *r.histogram;
    j["histogram"] = {{"bins", h.bins},
                      {"raw_min", h.raw_min},
                      {"raw_max", h.raw_max},
                      {"count_factual", h.factual},
                      {"count_unfactual", h.unfactual},
                      {"mean_factual", h.mean_factual},
                      {"mean_unfactual", h.mean_unfactual}};
  }
  j["truncated_pairs"] = r.truncated_pairs;
  j["notes"] = r.notes;
  return j;
}

std::vector<std::filesystem::path> write_report(const EvaluationReport& r,
                                                const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) raise(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;

  auto path = dir / "report.json";
  open_out(path) << report_to_json(r).dump(2) << '\n';
  written.push_back(path);

  if (r.corpus_f1) {
    path = dir / "split_f1.csv";
    {
      auto out = open_out(path);
      out << "split,f1\n";
      for (const auto& [split, f1] : r.per_split_f1) out << split << ',' << fmt(f1) << '\n';
      out << "average," << fmt(*r.average_split_f1) << '\n';
    }
    written.push_back(path);
    path = dir / "corpus_f1.csv";
    open_out(path) << "corpus_f1,threshold,predicted_positive_rate\n"
                   << fmt(*r.corpus_f1) << ',' << cell(r.threshold_used) << ','
                   << cell(r.predicted_positive_rate) << '\n';
    written.push_back(path);
  }

  if (!r.pearson.empty()) {
    path = dir / "summary_pearson.csv";
    {
      auto out = open_out(path);
      out << "dataset,pearson\n";
      for (const auto& [name, p] : r.pearson) out << name << ',' << fmt(p) << '\n';
    }
    written.push_back(path);
  }

  for (const auto& [name, c] : r.categories) {
    const char* file = c.category == Category::kEntE     ? "category_ente.csv"
                       : c.category == Category::kCorefE ? "category_corefe.csv"
                                                         : "category_oute.csv";
    path = dir / file;
    {
      auto out = open_out(path);
      out << "prompt,overall," << name << ",OutE,retained,excluded\n";
      out << "base," << cell(c.base.overall) << ',' << cell(c.base.category) << ','
          << cell(c.base.oute) << ',' << c.retained << ',' << c.excluded << '\n';
      out << name << ',' << cell(c.variant.overall) << ',' << cell(c.variant.category) << ','
          << cell(c.variant.oute) << ',' << c.retained << ',' << c.excluded << '\n';
    }
    written.push_back(path);
  }

  if (r.histogram) {
    const auto& h = *r.histogram;
    path = dir / "histogram.csv";
    {
      auto out = open_out(path);
      out << "bin_low,bin_high,count_factual,count_unfactual\n";
      for (std::size_t b = 0; b < h.bins; ++b) {
        out << fmt(h.bin_low(b)) << ',' << fmt(h.bin_high(b)) << ',' << h.factual[b] << ','
            << h.unfactual[b] << '\n';
      }
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace prefdiff
