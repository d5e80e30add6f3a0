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

#ifndef CTCCONF_KERNELS_HPP_
#define CTCCONF_KERNELS_HPP_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

// Dense double-precision kernels behind the recurrent error predictor.
//
// Every kernel has a scalar reference implementation plus vectorized
// variants (AVX2+FMA on x86-64, NEON on AArch64). The variant is picked once
// at startup from the CPU's capabilities and can be overridden for testing.
// Vectorized reductions reassociate sums, so results agree with the scalar
// reference to rounding, not bitwise; adam_update is the exception and
// matches bit for bit (no FMA contraction, same operation order).

namespace ctcconf::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

struct AdamStep {
  double learning_rate;
  double beta1;
  double beta2;
  double epsilon;
  // 1 - beta^t for the current step t.
  double bias_correction1;
  double bias_correction2;
};

struct KernelTable {
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y += A x, A row-major rows x cols
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  // x += A^T y
  void (*gemv_t)(const double* a, std::size_t rows, std::size_t cols, const double* y, double* x);
  // A += y x^T
  void (*ger)(double* a, std::size_t rows, std::size_t cols, const double* y, const double* x);
  // One Adam step over n parameters; updates params, m and v in place.
  void (*adam_update)(double* params, const double* grad, double* m, double* v, std::size_t n,
                      const AdamStep& step);
};

std::string_view isa_name(Isa isa);
// Compiled in and supported by the running CPU.
bool isa_available(Isa isa);
std::vector<Isa> available_isas();
Isa best_available_isa();

// Table for a specific variant. Throws ctcconf::InvalidArgument when the
// variant is unavailable.
const KernelTable& kernel_table(Isa isa);

// Variant used by the span wrappers below; defaults to best_available_isa().
Isa active_isa();
void set_active_isa(Isa isa);

const KernelTable& active();

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y);
void gemv_t(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> y, std::span<double> x);
void ger(std::span<double> a, std::size_t rows, std::size_t cols, std::span<const double> y,
         std::span<const double> x);
void adam_update(std::span<double> params, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, const AdamStep& step);

namespace detail {
const KernelTable& scalar_table();
#if defined(CTCCONF_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(CTCCONF_HAVE_NEON)
const KernelTable& neon_table();
#endif
}  // namespace detail

}  // namespace ctcconf::kernels

#endif  // CTCCONF_KERNELS_HPP_
