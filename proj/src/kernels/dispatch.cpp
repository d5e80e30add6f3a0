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

#include <atomic>
#include <string>

#include "ctcconf/errors.hpp"
#include "ctcconf/kernels.hpp"

namespace ctcconf::kernels {

namespace {

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(CTCCONF_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(CTCCONF_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{best_available_isa()};
  return slot;
}

void require(bool ok, const char* what) {
  if (!ok) throw DimensionMismatch(std::string("kernel operand sizes disagree: ") + what);
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) { return cpu_supports(isa); }

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
    if (isa_available(isa)) out.push_back(isa);
  }
  return out;
}

Isa best_available_isa() {
  if (isa_available(Isa::kAvx2)) return Isa::kAvx2;
  if (isa_available(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

const KernelTable& kernel_table(Isa isa) {
  if (!isa_available(isa)) {
    throw InvalidArgument("kernel variant '" + std::string(isa_name(isa)) +
                          "' is not available on this machine");
  }
  switch (isa) {
#if defined(CTCCONF_HAVE_AVX2)
    case Isa::kAvx2:
      return detail::avx2_table();
#endif
#if defined(CTCCONF_HAVE_NEON)
    case Isa::kNeon:
      return detail::neon_table();
#endif
    default:
      return detail::scalar_table();
  }
}

Isa active_isa() { return active_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  kernel_table(isa);  // throws when unavailable
  active_slot().store(isa, std::memory_order_relaxed);
}

const KernelTable& active() { return kernel_table(active_isa()); }

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot");
  return active().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require(x.size() == y.size(), "axpy");
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y) {
  require(a.size() == rows * cols && x.size() == cols && y.size() == rows, "gemv");
  active().gemv(a.data(), rows, cols, x.data(), y.data());
}

void gemv_t(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> y, std::span<double> x) {
  require(a.size() == rows * cols && x.size() == cols && y.size() == rows, "gemv_t");
  active().gemv_t(a.data(), rows, cols, y.data(), x.data());
}

void ger(std::span<double> a, std::size_t rows, std::size_t cols, std::span<const double> y,
         std::span<const double> x) {
  require(a.size() == rows * cols && x.size() == cols && y.size() == rows, "ger");
  active().ger(a.data(), rows, cols, y.data(), x.data());
}

void adam_update(std::span<double> params, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, const AdamStep& step) {
  require(grad.size() == params.size() && m.size() == params.size() &&
              v.size() == params.size(),
          "adam_update");
  active().adam_update(params.data(), grad.data(), m.data(), v.data(), params.size(), step);
}

}  // namespace ctcconf::kernels
