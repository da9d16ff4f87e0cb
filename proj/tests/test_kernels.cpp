#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "spgm/kernels.hpp"
#include "spgm/random.hpp"

namespace {

using spgm::RandomStream;
using spgm::StreamId;
namespace k = spgm::kernels;

std::vector<double> random_vector(RandomStream& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = 3.0 * rng.normal();
  return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

TEST(Kernels, ScalarReferenceValues) {
  const auto& s = k::scalar_table();
  const double a[] = {1, 2, 3};
  const double b[] = {4, -5, 6};
  EXPECT_EQ(s.dot(a, b, 3), 12.0);
  EXPECT_EQ(s.squared_norm(a, 3), 14.0);
  EXPECT_EQ(s.squared_distance(a, b, 3), 9.0 + 49.0 + 9.0);
  double out[3];
  const double v[] = {2.0, -0.5, -3.0};
  s.soft_threshold(v, 1.0, out, 3);
  EXPECT_EQ(out[0], 1.0);
  EXPECT_EQ(out[1], 0.0);
  EXPECT_EQ(out[2], -2.0);
  const double lo[] = {0, 0, 0};
  const double hi[] = {1, 1, 1};
  s.clamp(v, lo, hi, out, 3);
  EXPECT_EQ(out[0], 1.0);
  EXPECT_EQ(out[1], 0.0);
  EXPECT_EQ(out[2], 0.0);
  s.axpby(2.0, a, -1.0, b, out, 3);
  EXPECT_EQ(out[0], -2.0);
  EXPECT_EQ(out[1], 9.0);
  EXPECT_EQ(out[2], 0.0);
}

TEST(Kernels, ActiveTableIsKnown) {
  const auto name = k::active().name;
  EXPECT_TRUE(name == "scalar" || name == "avx2");
}

// Elementwise kernels agree bit for bit; reductions up to reassociation.
TEST(Kernels, Avx2MatchesScalar) {
  const k::KernelTable* simd = k::avx2_table();
  if (simd == nullptr) GTEST_SKIP() << "AVX2 variant unavailable on this host";
  const auto& ref = k::scalar_table();
  RandomStream rng(42, StreamId::kReplication);
  for (std::size_t n = 0; n < 70; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto a = random_vector(rng, n);
      const auto b = random_vector(rng, n);
      double abs_dot = 0.0, abs_dist = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        abs_dot += std::abs(a[i] * b[i]);
        abs_dist += (a[i] - b[i]) * (a[i] - b[i]);
      }
      EXPECT_NEAR(simd->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n),
                  1e-14 * abs_dot + 1e-300);
      EXPECT_NEAR(simd->squared_norm(a.data(), n), ref.squared_norm(a.data(), n),
                  1e-14 * ref.squared_norm(a.data(), n) + 1e-300);
      EXPECT_NEAR(simd->squared_distance(a.data(), b.data(), n),
                  ref.squared_distance(a.data(), b.data(), n), 1e-14 * abs_dist + 1e-300);

      std::vector<double> o1(n), o2(n);
      const double alpha = rng.normal(), beta = rng.normal();
      simd->axpby(alpha, a.data(), beta, b.data(), o1.data(), n);
      ref.axpby(alpha, a.data(), beta, b.data(), o2.data(), n);
      EXPECT_TRUE(bit_equal(o1, o2)) << "axpby n=" << n;

      const double tau = std::abs(rng.normal());
      simd->soft_threshold(a.data(), tau, o1.data(), n);
      ref.soft_threshold(a.data(), tau, o2.data(), n);
      EXPECT_TRUE(bit_equal(o1, o2)) << "soft_threshold n=" << n;

      std::vector<double> lo(n), hi(n);
      for (std::size_t i = 0; i < n; ++i) {
        lo[i] = std::min(a[i], b[i]);
        hi[i] = std::max(a[i], b[i]);
      }
      const auto v = random_vector(rng, n);
      simd->clamp(v.data(), lo.data(), hi.data(), o1.data(), n);
      ref.clamp(v.data(), lo.data(), hi.data(), o2.data(), n);
      EXPECT_TRUE(bit_equal(o1, o2)) << "clamp n=" << n;
    }
  }
}

TEST(Kernels, SpanFrontEndsAllowAliasedOutput) {
  std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> y{1.0, 1.0, 1.0, 1.0, 1.0};
  k::axpby(2.0, x, 1.0, y, x);
  EXPECT_EQ(x, (std::vector<double>{3.0, 5.0, 7.0, 9.0, 11.0}));
}

}  // namespace
