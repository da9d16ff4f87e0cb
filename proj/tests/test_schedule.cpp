#include <gtest/gtest.h>

#include <cmath>

#include "spgm/error.hpp"
#include "spgm/random.hpp"
#include "spgm/schedule.hpp"

namespace {

using namespace spgm;

// Formulas written out again, independently of schedule.cpp.
double ref_M(ScheduleVariant v, InexactConstants ic, double L, double s2, double phi0,
             double K) {
  const double r = std::sqrt(K * L * s2 / phi0);
  switch (v) {
    case ScheduleVariant::kConstantThm51:
      return 4 * L + 3 * std::sqrt(3.0) / 2 * r;
    case ScheduleVariant::kConstantVrThm52:
      return (1 + 3 * std::sqrt(2.0)) * L + 3 * std::sqrt(3.0) / std::pow(2.0, 0.75) * r;
    default:
      return (ic == InexactConstants::kProofDerived ? 7 : 4) * L + 2 * std::sqrt(2.0) * r;
  }
}

double ref_gamma_factor(ScheduleVariant v, InexactConstants ic) {
  switch (v) {
    case ScheduleVariant::kConstantThm51: return 3;
    case ScheduleVariant::kConstantVrThm52: return 3 * std::sqrt(2.0);
    default:
      return ic == InexactConstants::kProofDerived ? std::sqrt(152.0 / 17) : std::sqrt(456.0 / 17);
  }
}

double ref_floor(ScheduleVariant v, InexactConstants ic) {
  switch (v) {
    case ScheduleVariant::kConstantThm51: return 4;
    case ScheduleVariant::kConstantVrThm52: return 1 + 3 * std::sqrt(2.0);
    default: return ic == InexactConstants::kProofDerived ? 7 : 4;
  }
}

TEST(Schedule, ConstantMatchesIndependentFormulas) {
  RandomStream rng(31, StreamId::kReplication);
  for (auto v : {ScheduleVariant::kConstantThm51, ScheduleVariant::kConstantVrThm52,
                 ScheduleVariant::kConstantInexactThm61}) {
    for (auto ic : {InexactConstants::kProofDerived, InexactConstants::kAsStated}) {
      for (int t = 0; t < 200; ++t) {
        const double L = std::exp(4 * rng.uniform() - 2);
        const double s2 = std::exp(10 * rng.uniform() - 2);
        const double phi0 = std::exp(6 * rng.uniform() - 3);
        const auto K = static_cast<std::size_t>(1 + 1e5 * rng.uniform());
        const ScheduleParams p = schedule_constant(v, L, s2, phi0, K, ic);
        double M = ref_M(v, ic, L, s2, phi0, static_cast<double>(K));
        double g = ref_gamma_factor(v, ic) * L / (M - L);
        if (M <= ref_floor(v, ic) * L || g >= 1) {
          M = std::max(ref_floor(v, ic), 1 + ref_gamma_factor(v, ic)) * L * 1.001;
          g = ref_gamma_factor(v, ic) * L / (M - L);
        }
        EXPECT_NEAR(p.M, M, 1e-12 * M);
        EXPECT_NEAR(p.gamma, g, 1e-12 * g);
      }
    }
  }
}

TEST(Schedule, Examples) {
  const auto p = schedule_constant(ScheduleVariant::kConstantThm51, 1.0, 25.0, 1.0, 10000);
  EXPECT_NEAR(p.M, 1303.1, 0.1);
  EXPECT_NEAR(gamma_rule(ScheduleVariant::kConstantThm51, 1.0, 40.0), 3.0 / 39.0, 1e-15);
  EXPECT_NEAR(gamma_rule(ScheduleVariant::kManual, 1.0, 7.0), 0.5, 1e-15);

  // M_0 = max(sqrt(1 * 1 / 1), 4) sits on the floor and is lifted.
  const auto t0 = schedule_timevarying(0, 1.0, 1.0, 1.0);
  EXPECT_NEAR(t0.M, 4.0 * 1.001, 1e-12);
  EXPECT_NEAR(t0.gamma, 3.0 / (4.004 - 1.0), 1e-12);
  // sqrt(1600) = 40 clears the floor.
  const auto t = schedule_timevarying(1599, 1.0, 1.0, 1.0);
  EXPECT_NEAR(t.M, 40.0, 1e-12);
  EXPECT_NEAR(t.gamma, 3.0 / 39.0, 1e-15);

  // Noiseless: the formula lands on the floor.
  const auto z = schedule_constant(ScheduleVariant::kConstantThm51, 2.0, 0.0, 1.0, 100);
  EXPECT_NEAR(z.M, 4.0 * 2.0 * 1.001, 1e-12);
  EXPECT_LT(z.gamma, 1.0);

  EXPECT_NEAR(lyapunov_a(ScheduleVariant::kConstantThm51, 2.0), 3.0 / 16.0, 1e-15);
  EXPECT_NEAR(lyapunov_a(ScheduleVariant::kConstantVrThm52, 1.0), std::sqrt(2.0) / 8.0, 1e-15);
}

TEST(Schedule, RejectsBadInput) {
  const auto v = ScheduleVariant::kConstantThm51;
  EXPECT_THROW(schedule_constant(v, 1.0, 1.0, 0.0, 10), InvalidParameter);
  EXPECT_THROW(schedule_constant(v, 1.0, 1.0, -1.0, 10), InvalidParameter);
  EXPECT_THROW(schedule_constant(v, 1.0, 1.0, 1.0, 0), InvalidParameter);
  EXPECT_THROW(schedule_constant(v, 0.0, 1.0, 1.0, 10), InvalidParameter);
  EXPECT_THROW(schedule_constant(v, 1.0, -1.0, 1.0, 10), InvalidParameter);
  EXPECT_THROW(schedule_constant(ScheduleVariant::kManual, 1.0, 1.0, 1.0, 10),
               InvalidParameter);
  EXPECT_THROW(schedule_timevarying(0, 1.0, 1.0, 0.0), InvalidParameter);
  EXPECT_THROW(Schedule::manual(1.0, 0.0, 1.0), InvalidParameter);
  EXPECT_THROW(Schedule::manual(1.0, 1.5, 1.0), InvalidParameter);
  EXPECT_THROW(Schedule::manual(0.0, 0.5, 1.0), InvalidParameter);
  EXPECT_THROW(gamma_rule(v, 1.0, 1.0), InvalidParameter);
  EXPECT_THROW(parse_variant("nope"), InvalidInput);
}

TEST(Schedule, NamesRoundTrip) {
  for (auto v : {ScheduleVariant::kConstantThm51, ScheduleVariant::kConstantVrThm52,
                 ScheduleVariant::kConstantInexactThm61, ScheduleVariant::kTimeVaryingCor52,
                 ScheduleVariant::kManual}) {
    EXPECT_EQ(parse_variant(variant_name(v)), v);
  }
}

// Every non-manual schedule keeps M above its floor and gamma in (0, 1).
TEST(Schedule, FloorAndGammaProperty) {
  RandomStream rng(32, StreamId::kReplication);
  for (int t = 0; t < 2000; ++t) {
    const double L = std::exp(6 * rng.uniform() - 3);
    const double s2 = rng.uniform() < 0.1 ? 0.0 : std::exp(16 * rng.uniform() - 8);
    const double phi0 = std::exp(10 * rng.uniform() - 5);
    const auto K = static_cast<std::size_t>(1 + 1e6 * rng.uniform());
    for (auto v : {ScheduleVariant::kConstantThm51, ScheduleVariant::kConstantVrThm52,
                   ScheduleVariant::kConstantInexactThm61}) {
      for (auto ic : {InexactConstants::kProofDerived, InexactConstants::kAsStated}) {
        const Schedule s = Schedule::constant(v, L, s2, phi0, K, ic);
        const auto p = s.at(0);
        EXPECT_GT(p.M, s.floor());
        EXPECT_GT(p.gamma, 0.0);
        EXPECT_LT(p.gamma, 1.0);
      }
    }
    const Schedule tv = Schedule::timevarying(L, s2, phi0);
    const auto k = static_cast<std::size_t>(1e6 * rng.uniform());
    const auto p = tv.at(k);
    EXPECT_GT(p.M, tv.floor());
    EXPECT_GT(p.gamma, 0.0);
    EXPECT_LT(p.gamma, 1.0);
  }
}

TEST(Schedule, TimeVaryingIsMonotone) {
  const Schedule s = Schedule::timevarying(1.0, 100.0, 0.5);
  double prev_M = 0.0, prev_gamma = 1.0;
  for (std::size_t k = 0; k < 5000; ++k) {
    const auto p = s.at(k);
    EXPECT_GE(p.M, prev_M);
    EXPECT_LE(p.gamma, prev_gamma);
    prev_M = p.M;
    prev_gamma = p.gamma;
  }
  EXPECT_FALSE(s.is_constant());
}

TEST(Schedule, ManualIsVerbatim) {
  const Schedule s = Schedule::manual(0.3, 1.0, 1.0);
  EXPECT_EQ(s.at(0).M, 0.3);
  EXPECT_EQ(s.at(1234).gamma, 1.0);
  EXPECT_EQ(s.floor(), 0.0);
  EXPECT_TRUE(s.is_constant());
}

}  // namespace
