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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "uniclass/kernels.hpp"
#include "uniclass/rng.hpp"

using namespace uniclass;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-3.0, 3.0);
  return v;
}

}  // namespace

TEST_CASE("active isa is reportable") {
  const char* name = kernels::isa_name(kernels::active_isa());
  CHECK((std::string(name) == "scalar" || std::string(name) == "avx2"));
  MESSAGE("active kernel isa: ", name);
}

TEST_CASE("dot matches scalar reference across sizes") {
  Rng rng(42);
  // Cover the empty case, sub-vector-width tails, and multi-block lengths.
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 31u,
                        32u, 33u, 100u, 255u, 1024u}) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto a = random_vector(rng, n);
      const auto b = random_vector(rng, n);
      const double got = kernels::dot(a.data(), b.data(), n);
      const double want = kernels::ref::dot(a.data(), b.data(), n);
      double magnitude = 1.0;
      for (std::size_t i = 0; i < n; ++i) magnitude += std::fabs(a[i] * b[i]);
      CHECK(std::fabs(got - want) <= 1e-13 * magnitude);
    }
  }
}

TEST_CASE("squared_norm matches scalar reference") {
  Rng rng(7);
  for (std::size_t n : {0u, 1u, 3u, 4u, 9u, 16u, 33u, 500u}) {
    const auto a = random_vector(rng, n);
    const double got = kernels::squared_norm(a.data(), n);
    const double want = kernels::ref::squared_norm(a.data(), n);
    CHECK(std::fabs(got - want) <= 1e-13 * (1.0 + want));
  }
}

TEST_CASE("axpy and scale are bit-identical to the reference") {
  // Both variants perform the same per-element operations, so equality is
  // exact, not approximate.
  Rng rng(1234);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 8u, 13u, 64u, 257u}) {
    const auto x = random_vector(rng, n);
    auto y1 = random_vector(rng, n);
    auto y2 = y1;
    const double alpha = rng.uniform(-2.0, 2.0);
    kernels::axpy(alpha, x.data(), y1.data(), n);
    kernels::ref::axpy(alpha, x.data(), y2.data(), n);
    CHECK(y1 == y2);

    auto z1 = x;
    auto z2 = x;
    kernels::scale(alpha, z1.data(), n);
    kernels::ref::scale(alpha, z2.data(), n);
    CHECK(z1 == z2);
  }
}

TEST_CASE("dot is exact on integer-valued data") {
  std::vector<double> a(37), b(37);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = static_cast<double>(i % 7) - 3.0;
    b[i] = static_cast<double>(i % 5) - 2.0;
  }
  // Small integers multiply and add exactly in double, so any summation
  // order gives the same answer.
  CHECK(kernels::dot(a.data(), b.data(), a.size()) ==
        kernels::ref::dot(a.data(), b.data(), a.size()));
}

TEST_CASE("rng streams are platform-stable") {
  // Frozen first draws of splitmix64 seeded with 1.
  Rng rng(1);
  CHECK(rng.next_u64() == 0x910a2dec89025cc1ULL);
  CHECK(rng.next_u64() == 0xbeeb8da1658eec67ULL);
  Rng u(99);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  Rng g(123);
  double mean = 0.0;
  const int kDraws = 20000;
  for (int i = 0; i < kDraws; ++i) mean += g.normal();
  mean /= kDraws;
  CHECK(std::fabs(mean) < 0.03);
}
