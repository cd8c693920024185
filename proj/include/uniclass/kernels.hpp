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

#ifndef UNICLASS_KERNELS_HPP_
#define UNICLASS_KERNELS_HPP_

#include <cstddef>

// Dense inner loops behind the metric, loss, and trainer code: dot products,
// squared norms, and in-place vector updates.  A scalar reference version is
// always available; on x86-64 an AVX2/FMA variant is selected at startup when
// the CPU supports it.  Selection can be forced with the environment variable
// UNICLASS_KERNELS=scalar|avx2.
//
// Within one process the selected variant never changes, so every routine is
// a pure function of its inputs and results are bit-reproducible run to run
// on the same machine.  Across ISAs, dot/squared_norm may differ by summation
// order (reassociation); axpy and scale are elementwise and bit-identical to
// the reference everywhere.

namespace uniclass::kernels {

enum class Isa { kScalar, kAvx2 };

Isa active_isa();
const char* isa_name(Isa isa);

double dot(const double* a, const double* b, std::size_t n);
double squared_norm(const double* a, std::size_t n);
// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);
// x[i] *= alpha
void scale(double alpha, double* x, std::size_t n);

// Scalar reference implementations, kept callable as the oracle for the
// SIMD equivalence tests.
namespace ref {
double dot(const double* a, const double* b, std::size_t n);
double squared_norm(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
}  // namespace ref

}  // namespace uniclass::kernels

#endif  // UNICLASS_KERNELS_HPP_
