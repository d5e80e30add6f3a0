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

// Scalar reference kernels. Plain loops in natural order; every vectorized
// variant is tested against these.

#include <cmath>

#include "ctcconf/kernels.hpp"

namespace ctcconf::kernels::detail {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_scalar(const double* a, std::size_t rows, std::size_t cols, const double* x,
                 double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot_scalar(a + r * cols, x, cols);
}

void gemv_t_scalar(const double* a, std::size_t rows, std::size_t cols, const double* y,
                   double* x) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(y[r], a + r * cols, x, cols);
}

void ger_scalar(double* a, std::size_t rows, std::size_t cols, const double* y,
                const double* x) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(y[r], x, a + r * cols, cols);
}

void adam_scalar(double* params, const double* grad, double* m, double* v, std::size_t n,
                 const AdamStep& s) {
  const double one_minus_b1 = 1.0 - s.beta1;
  const double one_minus_b2 = 1.0 - s.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    // Written as separate products and sums so that no FMA contraction can
    // change the rounding; the vector variants mirror this order exactly.
    const double m_decay = s.beta1 * m[i];
    const double m_new_part = one_minus_b1 * g;
    m[i] = m_decay + m_new_part;
    const double v_decay = s.beta2 * v[i];
    const double g2 = g * g;
    const double v_new_part = one_minus_b2 * g2;
    v[i] = v_decay + v_new_part;
    const double m_hat = m[i] / s.bias_correction1;
    const double v_hat = v[i] / s.bias_correction2;
    const double denom = std::sqrt(v_hat) + s.epsilon;
    const double step = s.learning_rate * m_hat;
    params[i] -= step / denom;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{dot_scalar,    axpy_scalar, gemv_scalar,
                                 gemv_t_scalar, ger_scalar,  adam_scalar};
  return table;
}

}  // namespace ctcconf::kernels::detail
