#include "spgm/kernels.hpp"

#include <algorithm>

namespace spgm::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_norm_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

double squared_distance_scalar(const double* a, const double* b,
                               std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

void axpby_scalar(double alpha, const double* x, double beta, const double* y,
                  double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = alpha * x[i];
    const double by = beta * y[i];
    out[i] = ax + by;
  }
}

// max(v - tau, 0) + min(v + tau, 0); same operation order as the SIMD path.
void soft_threshold_scalar(const double* v, double tau, double* out,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double up = std::max(v[i] - tau, 0.0);
    const double down = std::min(v[i] + tau, 0.0);
    out[i] = up + down;
  }
}

void clamp_scalar(const double* v, const double* lo, const double* hi,
                  double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::min(std::max(v[i], lo[i]), hi[i]);
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      "scalar",          dot_scalar,           squared_norm_scalar,
      squared_distance_scalar, axpby_scalar, soft_threshold_scalar,
      clamp_scalar,
  };
  return table;
}

}  // namespace spgm::kernels
