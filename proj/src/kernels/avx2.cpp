// Compiled with -mavx2 -mfma; only reached through avx2_table() after a
// runtime CPU check.

#include <immintrin.h>

#include <algorithm>

#include "spgm/kernels.hpp"

namespace spgm::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_norm_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    acc = _mm256_fmadd_pd(va, va, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * a[i];
  return s;
}

double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d diff =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(diff, diff, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

// No FMA here: the scalar reference rounds alpha*x and beta*y separately.
void axpby_avx2(double alpha, const double* x, double beta, const double* y,
                double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ax = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    const __m256d by = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(ax, by));
  }
  for (; i < n; ++i) {
    const double ax = alpha * x[i];
    const double by = beta * y[i];
    out[i] = ax + by;
  }
}

void soft_threshold_avx2(const double* v, double tau, double* out,
                         std::size_t n) {
  const __m256d vt = _mm256_set1_pd(tau);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(v + i);
    const __m256d up = _mm256_max_pd(_mm256_sub_pd(x, vt), zero);
    const __m256d down = _mm256_min_pd(_mm256_add_pd(x, vt), zero);
    _mm256_storeu_pd(out + i, _mm256_add_pd(up, down));
  }
  for (; i < n; ++i) {
    const double up = std::max(v[i] - tau, 0.0);
    const double down = std::min(v[i] + tau, 0.0);
    out[i] = up + down;
  }
}

void clamp_avx2(const double* v, const double* lo, const double* hi,
                double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_max_pd(_mm256_loadu_pd(v + i), _mm256_loadu_pd(lo + i));
    _mm256_storeu_pd(out + i, _mm256_min_pd(x, _mm256_loadu_pd(hi + i)));
  }
  for (; i < n; ++i) out[i] = std::min(std::max(v[i], lo[i]), hi[i]);
}

}  // namespace

const KernelTable& avx2_table_unchecked() {
  static const KernelTable table{
      "avx2",           dot_avx2,           squared_norm_avx2,
      squared_distance_avx2, axpby_avx2, soft_threshold_avx2,
      clamp_avx2,
  };
  return table;
}

}  // namespace spgm::kernels
