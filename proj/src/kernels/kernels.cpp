// Copyright 2026 The uniclass Authors
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

#include "uniclass/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace uniclass::kernels {

#if UNICLASS_HAVE_AVX2
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double squared_norm(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
}  // namespace avx2
#endif

namespace {

struct Dispatch {
  Isa isa;
  double (*dot)(const double*, const double*, std::size_t);
  double (*squared_norm)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
};

constexpr Dispatch kScalarTable{Isa::kScalar, ref::dot, ref::squared_norm,
                                ref::axpy, ref::scale};

Dispatch select_dispatch() {
  const char* forced = std::getenv("UNICLASS_KERNELS");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) {
    return kScalarTable;
  }
#if UNICLASS_HAVE_AVX2
  const bool cpu_ok =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  const bool want_avx2 =
      forced == nullptr || std::strcmp(forced, "avx2") == 0 ||
      std::strcmp(forced, "auto") == 0;
  if (cpu_ok && want_avx2) {
    return Dispatch{Isa::kAvx2, avx2::dot, avx2::squared_norm, avx2::axpy,
                    avx2::scale};
  }
#endif
  // TODO: NEON variants for aarch64.
  return kScalarTable;
}

const Dispatch& table() {
  static const Dispatch t = select_dispatch();
  return t;
}

}  // namespace

Isa active_isa() { return table().isa; }

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

double dot(const double* a, const double* b, std::size_t n) {
  return table().dot(a, b, n);
}

double squared_norm(const double* a, std::size_t n) {
  return table().squared_norm(a, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  table().axpy(alpha, x, y, n);
}

void scale(double alpha, double* x, std::size_t n) {
  table().scale(alpha, x, n);
}

}  // namespace uniclass::kernels
