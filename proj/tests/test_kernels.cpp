/* Copyright 2026 The ctcconf Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cmath>

#include "ctcconf/errors.hpp"
#include "ctcconf/kernels.hpp"
#include "ctcconf/rng.hpp"
#include "doctest.h"

using namespace ctcconf;
using kernels::Isa;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = uniform(rng, -1.0, 1.0);
  return v;
}

// Sizes around the vector widths and unroll factors, including tails.
const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 64, 100};

double tolerance(std::size_t n) { return 1e-14 * static_cast<double>(n + 1); }

}  // namespace

TEST_CASE("scalar kernels match naive loops") {
  Rng rng = make_stream(70, 0);
  const auto& k = kernels::kernel_table(Isa::kScalar);
  const std::size_t rows = 5, cols = 7;
  const auto a = random_vector(rng, rows * cols);
  const auto x = random_vector(rng, cols);
  const auto y = random_vector(rng, rows);

  double dot = 0.0;
  for (std::size_t i = 0; i < cols; ++i) dot += x[i] * a[i];
  CHECK(k.dot(x.data(), a.data(), cols) == doctest::Approx(dot));

  std::vector<double> out(rows, 1.0);
  k.gemv(a.data(), rows, cols, x.data(), out.data());
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 1.0;
    for (std::size_t c = 0; c < cols; ++c) s += a[r * cols + c] * x[c];
    CHECK(out[r] == doctest::Approx(s));
  }

  std::vector<double> back(cols, 0.5);
  k.gemv_t(a.data(), rows, cols, y.data(), back.data());
  for (std::size_t c = 0; c < cols; ++c) {
    double s = 0.5;
    for (std::size_t r = 0; r < rows; ++r) s += a[r * cols + c] * y[r];
    CHECK(back[c] == doctest::Approx(s));
  }

  auto outer = a;
  k.ger(outer.data(), rows, cols, y.data(), x.data());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      CHECK(outer[r * cols + c] == doctest::Approx(a[r * cols + c] + y[r] * x[c]));
    }
  }

  auto acc = y;
  k.axpy(2.0, y.data(), acc.data(), rows);
  for (std::size_t i = 0; i < rows; ++i) CHECK(acc[i] == doctest::Approx(3.0 * y[i]));
}

TEST_CASE("adam step against the textbook update") {
  const auto& k = kernels::kernel_table(Isa::kScalar);
  std::vector<double> p{1.0, -2.0}, g{0.5, -0.25}, m{0.0, 0.0}, v{0.0, 0.0};
  const kernels::AdamStep step{0.1, 0.9, 0.999, 1e-8, 0.1, 0.001};
  k.adam_update(p.data(), g.data(), m.data(), v.data(), 2, step);
  // First step: m_hat = g, v_hat = g^2, so each parameter moves by lr * sign(g).
  CHECK(p[0] == doctest::Approx(0.9));
  CHECK(p[1] == doctest::Approx(-1.9));
  CHECK(m[0] == doctest::Approx(0.05));
  CHECK(v[1] == doctest::Approx(0.001 * 0.0625));
}

TEST_CASE("scalar is always available and selectable") {
  CHECK(kernels::isa_available(Isa::kScalar));
  const auto isas = kernels::available_isas();
  CHECK(isas.front() == Isa::kScalar);
  const Isa saved = kernels::active_isa();
  kernels::set_active_isa(Isa::kScalar);
  CHECK(kernels::active_isa() == Isa::kScalar);
  kernels::set_active_isa(saved);
  CHECK(kernels::isa_name(Isa::kAvx2) == "avx2");
}

TEST_CASE("unavailable variants are refused") {
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (!kernels::isa_available(isa)) {
      CHECK_THROWS_AS(kernels::kernel_table(isa), InvalidArgument);
      CHECK_THROWS_AS(kernels::set_active_isa(isa), InvalidArgument);
    }
  }
}

TEST_CASE("span wrappers check sizes") {
  std::vector<double> a(6), x(3), y(2);
  CHECK_THROWS_AS(kernels::dot(x, y), DimensionMismatch);
  CHECK_THROWS_AS(kernels::axpy(1.0, x, y), DimensionMismatch);
  CHECK_THROWS_AS(kernels::gemv(a, 3, 3, x, y), DimensionMismatch);
  CHECK_THROWS_AS(kernels::gemv(a, 2, 3, y, y), DimensionMismatch);
  CHECK_NOTHROW(kernels::gemv(a, 2, 3, x, y));
}

TEST_CASE("vector variants agree with the scalar reference") {
  const auto& ref = kernels::kernel_table(Isa::kScalar);
  for (Isa isa : kernels::available_isas()) {
    if (isa == Isa::kScalar) continue;
    const std::string name(kernels::isa_name(isa));
    CAPTURE(name);
    const auto& k = kernels::kernel_table(isa);
    Rng rng = make_stream(71, static_cast<std::uint64_t>(isa));
    for (std::size_t n : kSizes) {
      CAPTURE(n);
      const auto a = random_vector(rng, n);
      const auto b = random_vector(rng, n);
      CHECK(std::abs(k.dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= tolerance(n));

      auto y1 = b, y2 = b;
      k.axpy(0.37, a.data(), y1.data(), n);
      ref.axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15);

      for (std::size_t rows : {1, 3, 4, 5, 9, 96}) {
        const auto m = random_vector(rng, rows * n);
        const auto yv = random_vector(rng, rows);
        std::vector<double> g1(rows, 0.25), g2(rows, 0.25);
        k.gemv(m.data(), rows, n, a.data(), g1.data());
        ref.gemv(m.data(), rows, n, a.data(), g2.data());
        for (std::size_t r = 0; r < rows; ++r) CHECK(std::abs(g1[r] - g2[r]) <= tolerance(n));

        auto t1 = b, t2 = b;
        k.gemv_t(m.data(), rows, n, yv.data(), t1.data());
        ref.gemv_t(m.data(), rows, n, yv.data(), t2.data());
        for (std::size_t c = 0; c < n; ++c) CHECK(std::abs(t1[c] - t2[c]) <= tolerance(rows));

        auto o1 = m, o2 = m;
        k.ger(o1.data(), rows, n, yv.data(), a.data());
        ref.ger(o2.data(), rows, n, yv.data(), a.data());
        for (std::size_t i = 0; i < o1.size(); ++i) CHECK(std::abs(o1[i] - o2[i]) <= 1e-15);
      }
    }
  }
}

TEST_CASE("adam is bit-identical across variants") {
  const auto& ref = kernels::kernel_table(Isa::kScalar);
  for (Isa isa : kernels::available_isas()) {
    const auto& k = kernels::kernel_table(isa);
    Rng rng = make_stream(72, 0);
    for (std::size_t n : kSizes) {
      auto p1 = random_vector(rng, n);
      auto m1 = random_vector(rng, n);
      auto v1 = random_vector(rng, n);
      for (double& x : v1) x = std::abs(x);
      const auto g = random_vector(rng, n);
      auto p2 = p1, m2 = m1, v2 = v1;
      for (int t = 1; t <= 5; ++t) {
        const kernels::AdamStep step{1e-3, 0.9, 0.999, 1e-8, 1.0 - std::pow(0.9, t),
                                     1.0 - std::pow(0.999, t)};
        k.adam_update(p1.data(), g.data(), m1.data(), v1.data(), n, step);
        ref.adam_update(p2.data(), g.data(), m2.data(), v2.data(), n, step);
      }
      CHECK(p1 == p2);
      CHECK(m1 == m2);
      CHECK(v1 == v2);
    }
  }
}
