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

#include "prefdiff/evaldata/metrics.h"

#include <algorithm>
#include <cmath>

#include "prefdiff/common/error.h"

namespace prefdiff {

Confusion& Confusion::operator+=(const Confusion& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

double Confusion::precision() const {
  return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double Confusion::recall() const {
  return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double Confusion::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

Confusion confusion(std::span<const int> predictions, std::span<const int> golds) {
  if (predictions.size() != golds.size()) {
    raise(ErrorCode::kAlignment, "prediction and gold sequences differ in length (" +
                                     std::to_string(predictions.size()) + " vs " +
                                     std::to_string(golds.size()) + ")");
  }
  Confusion c;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const bool p = predictions[i] != 0;
    const bool g = golds[i] != 0;
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

F1Report token_f1(const std::vector<std::vector<int>>& predictions,
                  const std::vector<std::vector<int>>& golds,
                  const std::vector<std::string>& splits) {
  if (predictions.size() != golds.size() || splits.size() != golds.size()) {
    raise(ErrorCode::kAlignment, "predictions, golds and splits differ in example count");
  }
  F1Report r;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const Confusion c = confusion(predictions[i], golds[i]);
    r.per_split[splits[i]] += c;
    r.corpus += c;
  }
  double sum = 0.0;
  for (const auto& [split, c] : r.per_split) {
    r.per_split_f1[split] = c.f1();
    sum += c.f1();
    if (c.degenerate()) r.degenerate_splits.push_back(split);
  }
  r.average_split_f1 = r.per_split.empty() ? 0.0 : sum / static_cast<double>(r.per_split.size());
  r.corpus_f1 = r.corpus.f1();
  return r;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) raise(ErrorCode::kAlignment, "pearson: length mismatch");
  if (x.size() < 3) {
    raise(ErrorCode::kDegenerate, "pearson needs at least 3 pairs, got " + std::to_string(x.size()));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0) raise(ErrorCode::kDegenerate, "pearson: scores have zero variance");
  if (syy == 0.0) raise(ErrorCode::kDegenerate, "pearson: human judgments have zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Histogram emit_histogram(std::span<const double> scores, std::span<const int> labels,
                         std::size_t bins) {
  if (scores.size() != labels.size()) raise(ErrorCode::kAlignment, "histogram: length mismatch");
  if (bins == 0) raise(ErrorCode::kConfig, "histogram needs at least one bin");
  const auto n_unfactual =
      static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](int l) { return l != 0; }));
  if (n_unfactual == 0 || n_unfactual == labels.size()) {
    raise(ErrorCode::kDegenerate, "histogram needs both factual and unfactual tokens");
  }
  Histogram h;
  h.bins = bins;
  h.factual.assign(bins, 0);
  h.unfactual.assign(bins, 0);
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  h.raw_min = *lo;
  h.raw_max = *hi;
  const double range = h.raw_max - h.raw_min;
  double sum_f = 0.0, sum_u = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double norm = range > 0.0 ? (scores[i] - h.raw_min) / range : 0.0;
    const auto b = std::min(bins - 1, static_cast<std::size_t>(norm * static_cast<double>(bins)));
    if (labels[i] != 0) {
      ++h.unfactual[b];
      sum_u += norm;
    } else {
      ++h.factual[b];
      sum_f += norm;
    }
  }
  h.mean_unfactual = sum_u / static_cast<double>(n_unfactual);
  h.mean_factual = sum_f / static_cast<double>(labels.size() - n_unfactual);
  return h;
}

}  // namespace prefdiff
