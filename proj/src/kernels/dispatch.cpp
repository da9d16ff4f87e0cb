#include <cstdlib>
#include <string_view>

#include "spgm/kernels.hpp"

namespace spgm::kernels {

#if defined(SPGM_HAS_AVX2)
const KernelTable& avx2_table_unchecked();
#endif

const KernelTable* avx2_table() {
#if defined(SPGM_HAS_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable* selected = [] {
    const char* forced = std::getenv("SPGM_SIMD");
    if (forced != nullptr && std::string_view(forced) == "scalar") {
      return &scalar_table();
    }
    const KernelTable* simd = avx2_table();
    return simd != nullptr ? simd : &scalar_table();
  }();
  return *selected;
}

double dot(ConstSpan a, ConstSpan b) {
  return active().dot(a.data(), b.data(), a.size());
}

double squared_norm(ConstSpan a) {
  return active().squared_norm(a.data(), a.size());
}

double squared_distance(ConstSpan a, ConstSpan b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}

void axpby(double alpha, ConstSpan x, double beta, ConstSpan y, MutSpan out) {
  active().axpby(alpha, x.data(), beta, y.data(), out.data(), out.size());
}

void soft_threshold(ConstSpan v, double tau, MutSpan out) {
  active().soft_threshold(v.data(), tau, out.data(), out.size());
}

void clamp(ConstSpan v, ConstSpan lo, ConstSpan hi, MutSpan out) {
  active().clamp(v.data(), lo.data(), hi.data(), out.data(), out.size());
}

}  // namespace spgm::kernels
