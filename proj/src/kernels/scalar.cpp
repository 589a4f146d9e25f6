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

#include <cmath>
#include <limits>

#include "prefdiff/kernels/kernels.h"

namespace prefdiff::kernels::scalar {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void gemv(const double* m, std::size_t rows, std::size_t cols, const double* x,
          double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot(m + r * cols, x, cols);
}

void gemv_t(const double* m, std::size_t rows, std::size_t cols,
            const double* c, double* out) {
  for (std::size_t k = 0; k < cols; ++k) out[k] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double w = c[r];
    if (w == 0.0) continue;
    const double* row = m + r * cols;
    for (std::size_t k = 0; k < cols; ++k) out[k] += w * row[k];
  }
}

double logsumexp(const double* x, std::size_t n) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) mx = x[i] > mx ? x[i] : mx;
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(x[i] - mx);
  return mx + std::log(s);
}

void exp_shift(const double* x, std::size_t n, double shift, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i] - shift);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{Isa::kScalar, "scalar", dot,       gemv,
                             gemv_t,       logsumexp, exp_shift, axpy};
  return t;
}

}  // namespace prefdiff::kernels::scalar
