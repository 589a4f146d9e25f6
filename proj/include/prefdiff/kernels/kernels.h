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

// Dense double-precision kernels used by the embedding backend's forward and
// backward passes. Each instruction set provides the same table of entry
// points; `active()` picks the widest one the running CPU supports. The scalar
// table is the reference that every other table is equivalence-tested against.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace prefdiff::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // out[r] = sum_k m[r * cols + k] * x[k]
  void (*gemv)(const double* m, std::size_t rows, std::size_t cols,
               const double* x, double* out);
  // out[k] = sum_r c[r] * m[r * cols + k]
  void (*gemv_t)(const double* m, std::size_t rows, std::size_t cols,
                 const double* c, double* out);
  double (*logsumexp)(const double* x, std::size_t n);
  // out[i] = exp(x[i] - shift)
  void (*exp_shift)(const double* x, std::size_t n, double shift, double* out);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
};

namespace scalar {
const KernelTable& table();
}
#if defined(PREFDIFF_HAVE_AVX2)
namespace avx2 {
const KernelTable& table();
}
#endif

bool cpu_supports(Isa isa);

/// Tables compiled in and usable on this CPU, scalar first.
std::vector<const KernelTable*> available();

/// Selected once per process. `PREFDIFF_KERNELS=scalar` forces the reference
/// path.
const KernelTable& active();

// Span conveniences over the active table.
double dot(std::span<const double> a, std::span<const double> b);
double logsumexp(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);

}  // namespace prefdiff::kernels
