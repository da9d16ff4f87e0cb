#pragma once

// Dense vector kernels used by the optimizer inner loops.
//
// Every kernel has a scalar reference implementation. On x86-64 an AVX2/FMA
// variant is compiled as well and picked at runtime when the CPU supports it.
// Elementwise kernels are bit-identical between variants; reductions differ
// only by floating-point reassociation.

#include <cstddef>
#include <span>
#include <string_view>

namespace spgm::kernels {

using ConstSpan = std::span<const double>;
using MutSpan = std::span<double>;

struct KernelTable {
  std::string_view name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_norm)(const double* a, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // out = alpha * x + beta * y
  void (*axpby)(double alpha, const double* x, double beta, const double* y,
                double* out, std::size_t n);
  // out = sign(v) * max(|v| - tau, 0)
  void (*soft_threshold)(const double* v, double tau, double* out,
                         std::size_t n);
  // out = min(max(v, lo), hi)
  void (*clamp)(const double* v, const double* lo, const double* hi,
                double* out, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();

// Selected once per process. SPGM_SIMD=scalar forces the reference kernels.
const KernelTable& active();

// Span-based front ends over active(). Sizes are checked by the callers.
double dot(ConstSpan a, ConstSpan b);
double squared_norm(ConstSpan a);
double squared_distance(ConstSpan a, ConstSpan b);
void axpby(double alpha, ConstSpan x, double beta, ConstSpan y, MutSpan out);
void soft_threshold(ConstSpan v, double tau, MutSpan out);
void clamp(ConstSpan v, ConstSpan lo, ConstSpan hi, MutSpan out);

}  // namespace spgm::kernels
