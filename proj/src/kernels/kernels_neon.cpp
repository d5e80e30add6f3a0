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
// NEON kernels, 2 doubles per register. Advanced SIMD is mandatory on
// AArch64, so no runtime check is needed.

#include <arm_neon.h>

#include <cmath>

#include "ctcconf/kernels.hpp"

namespace ctcconf::kernels::detail {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  if (i + 2 <= n) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    i += 2;
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_neon(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  std::size_t r = 0;
  // Two rows at a time share each load of x.
  for (; r + 2 <= rows; r += 2) {
    const double* a0 = a + r * cols;
    const double* a1 = a0 + cols;
    float64x2_t s0 = vdupq_n_f64(0.0);
    float64x2_t s1 = vdupq_n_f64(0.0);
    std::size_t c = 0;
    for (; c + 2 <= cols; c += 2) {
      const float64x2_t vx = vld1q_f64(x + c);
      s0 = vfmaq_f64(s0, vld1q_f64(a0 + c), vx);
      s1 = vfmaq_f64(s1, vld1q_f64(a1 + c), vx);
    }
    double t0 = vaddvq_f64(s0);
    double t1 = vaddvq_f64(s1);
    for (; c < cols; ++c) {
      t0 += a0[c] * x[c];
      t1 += a1[c] * x[c];
    }
    y[r] += t0;
    y[r + 1] += t1;
  }
  for (; r < rows; ++r) y[r] += dot_neon(a + r * cols, x, cols);
}

void gemv_t_neon(const double* a, std::size_t rows, std::size_t cols, const double* y,
                 double* x) {
  for (std::size_t r = 0; r < rows; ++r) axpy_neon(y[r], a + r * cols, x, cols);
}

void ger_neon(double* a, std::size_t rows, std::size_t cols, const double* y, const double* x) {
  for (std::size_t r = 0; r < rows; ++r) axpy_neon(y[r], x, a + r * cols, cols);
}

void adam_neon(double* params, const double* grad, double* m, double* v, std::size_t n,
               const AdamStep& s) {
  const double one_minus_b1 = 1.0 - s.beta1;
  const double one_minus_b2 = 1.0 - s.beta2;
  const float64x2_t b1 = vdupq_n_f64(s.beta1);
  const float64x2_t b2 = vdupq_n_f64(s.beta2);
  const float64x2_t c1 = vdupq_n_f64(one_minus_b1);
  const float64x2_t c2 = vdupq_n_f64(one_minus_b2);
  const float64x2_t bc1 = vdupq_n_f64(s.bias_correction1);
  const float64x2_t bc2 = vdupq_n_f64(s.bias_correction2);
  const float64x2_t eps = vdupq_n_f64(s.epsilon);
  const float64x2_t lr = vdupq_n_f64(s.learning_rate);
  std::size_t i = 0;
  // Separate multiplies and adds, never vfmaq, so the result matches the scalar path bit for bit.
  for (; i + 2 <= n; i += 2) {
    const float64x2_t g = vld1q_f64(grad + i);
    const float64x2_t mi = vaddq_f64(vmulq_f64(b1, vld1q_f64(m + i)), vmulq_f64(c1, g));
    const float64x2_t vi =
        vaddq_f64(vmulq_f64(b2, vld1q_f64(v + i)), vmulq_f64(c2, vmulq_f64(g, g)));
    vst1q_f64(m + i, mi);
    vst1q_f64(v + i, vi);
    const float64x2_t m_hat = vdivq_f64(mi, bc1);
    const float64x2_t v_hat = vdivq_f64(vi, bc2);
    const float64x2_t denom = vaddq_f64(vsqrtq_f64(v_hat), eps);
    const float64x2_t step = vdivq_f64(vmulq_f64(lr, m_hat), denom);
    vst1q_f64(params + i, vsubq_f64(vld1q_f64(params + i), step));
  }
  for (; i < n; ++i) {
    const double g = grad[i];
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

const KernelTable& neon_table() {
  static const KernelTable table{dot_neon,    axpy_neon, gemv_neon,
                                 gemv_t_neon, ger_neon,  adam_neon};
  return table;
}

}  // namespace ctcconf::kernels::detail
