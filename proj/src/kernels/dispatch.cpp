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

#include <cstdlib>
#include <string_view>

#include "prefdiff/kernels/kernels.h"

namespace prefdiff::kernels {

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(PREFDIFF_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

std::vector<const KernelTable*> available() {
  std::vector<const KernelTable*> out{&scalar::table()};
#if defined(PREFDIFF_HAVE_AVX2)
  if (cpu_supports(Isa::kAvx2)) out.push_back(&avx2::table());
#endif
  return out;
}

namespace {
const KernelTable& select() {
  const char* forced = std::getenv("PREFDIFF_KERNELS");
  if (forced != nullptr && std::string_view(forced) == "scalar") {
    return scalar::table();
  }
  return *available().back();
}
}  // namespace

const KernelTable& active() {
  static const KernelTable& t = select();
  return t;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

double logsumexp(std::span<const double> x) {
  return active().logsumexp(x.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

}  // namespace prefdiff::kernels
