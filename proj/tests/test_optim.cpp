#include <gtest/gtest.h>

#include <cmath>

#include "spgm/kernels.hpp"
#include "spgm/optim.hpp"

namespace {

using namespace spgm;

TEST(Momentum, UpdateExamples) {
  EXPECT_EQ(momentum_update(Point{0.0}, Point{1.0}, 1.0), Point{1.0});
  EXPECT_EQ(momentum_update(Point{2.0}, Point{4.0}, 0.5), Point{3.0});
  EXPECT_THROW(momentum_update(Point{0.0}, Point{1.0}, 0.0), InvalidParameter);
  EXPECT_THROW(momentum_update(Point{0.0}, Point{1.0}, 1.5), InvalidParameter);
  EXPECT_THROW(momentum_update(Point{0.0, 1.0}, Point{1.0}, 0.5), InvalidInput);
}

TEST(Momentum, InitialMomentumStrategies) {
  const Point g0{2.0, -4.0};
  const Point zero = initial_momentum(InitKind::kNonCompositeZero, g0, 0.25);
  // m_0 = (1 - gamma) m_{-1} + gamma g_0 = 0.
  const Point m0 = momentum_update(zero, g0, 0.25);
  EXPECT_NEAR(m0[0], 0.0, 1e-15);
  EXPECT_NEAR(m0[1], 0.0, 1e-15);
  EXPECT_EQ(initial_momentum(InitKind::kNonCompositeZero, g0, 1.0), (Point{0.0, 0.0}));
  EXPECT_EQ(initial_momentum(InitKind::kCompositeG0, g0, 0.3), g0);
  EXPECT_EQ(momentum_update(initial_momentum(InitKind::kCompositeG0, g0, 0.3), g0, 0.3), g0);
}

TEST(Momentum, MinibatchSize) {
  EXPECT_EQ(minibatch_size(25.0, 1.0, 2.5), 10u);
  EXPECT_EQ(minibatch_size(0.0, 1.0, 2.5), 1u);
  EXPECT_EQ(minibatch_size(10.0, 1.0, 3.0), 4u);
  EXPECT_THROW(minibatch_size(1.0, 1.0, 0.0), InvalidParameter);
}

// Noiseless gradient descent: with psi = 0 the prox step is x - g/M.
TEST(Steps, VanillaIsGradientDescent) {
  const CompositeProblem p = build_quadratic_instance(2.0, 0.0, 0.0, 3);
  RandomStream rng(1, StreamId::kGradientNoise);
  OracleCounter counter;
  const Point x{1.0, -2.0, 0.5};
  const StepOutput s = vanilla_step(p, x, 4.0, 1, rng, counter);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(s.x_next[i], x[i] * 0.5, 1e-15);
  EXPECT_EQ(counter.calls(), 1u);
}

// On the quadratic instance without noise each step multiplies x by
// (M - L) / (M + a).
TEST(Steps, ContractionFactor) {
  const double L = 1.0, a = 3.0, M = 5.0;
  const CompositeProblem p = build_quadratic_instance(L, a, 0.0, 2);
  RunOptions o;
  o.method = Method::kVanilla;
  o.K = 10;
  o.x0 = Point{1.0, -1.0};
  const RunResult r = run(p, Schedule::manual(M, 1.0, L), o, 7);
  const double c = (M - L) / (M + a);
  EXPECT_NEAR(r.x_final[0], std::pow(c, 10), 1e-14);
  EXPECT_NEAR(r.x_final[1], -std::pow(c, 10), 1e-14);
}

// gamma = 1 momentum is vanilla: same stream, same iterates.
TEST(Steps, MomentumWithUnitGammaIsVanilla) {
  const CompositeProblem p = build_quadratic_instance(1.0, 0.0, 4.0, 4);
  RunOptions o;
  o.K = 50;
  o.x0 = Point(4, 1.0);
  o.init.kind = InitKind::kCompositeG0;
  o.method = Method::kVanilla;
  const Schedule s = Schedule::manual(3.0, 1.0, 1.0);
  const RunResult v = run(p, s, o, 11);
  o.method = Method::kMomentum;
  const RunResult m = run(p, s, o, 11);
  ASSERT_EQ(v.records.size(), m.records.size());
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(v.x_final[i], m.x_final[i]);
  for (std::size_t k = 0; k < v.records.size(); ++k) {
    EXPECT_EQ(v.records[k].grad_norm_sq, m.records[k].grad_norm_sq);
  }
}

TEST(Run, EdgeCases) {
  const CompositeProblem p = build_quadratic_instance(1.0, 1.0, 1.0, 2);
  RunOptions o;
  o.x0 = Point{1.0, 1.0};
  o.K = 0;
  const Schedule s = Schedule::manual(10.0, 0.5, 1.0);
  const RunResult none = run(p, s, o, 1);
  EXPECT_TRUE(none.records.empty());
  EXPECT_FALSE(none.output.has_value());
  EXPECT_EQ(none.oracle_calls, 0u);

  o.K = 1;
  const RunResult one = run(p, s, o, 1);
  ASSERT_TRUE(one.output.has_value());
  EXPECT_EQ(one.output->index, 1u);
  EXPECT_EQ(one.records.size(), 2u);
  EXPECT_EQ(one.output->x, one.x_final);
  ASSERT_TRUE(one.output_record.has_value());
  EXPECT_EQ(one.output_record->k, 1u);

  o.x0 = Point{1.0};
  EXPECT_THROW(run(p, s, o, 1), InvalidInput);
  o.x0 = Point{1.0, NAN};
  EXPECT_THROW(run(p, s, o, 1), InvalidInput);
  o.x0 = Point{1.0, 1.0};
  o.batch = 0;
  EXPECT_THROW(run(p, s, o, 1), InvalidParameter);
}

TEST(Run, OracleAccounting) {
  const CompositeProblem p = build_quadratic_instance(1.0, 1.0, 9.0, 3);
  const Schedule s = Schedule::manual(10.0, 0.5, 1.0);
  RunOptions o;
  o.x0 = Point(3, 1.0);
  o.K = 20;
  o.batch = 3;
  const RunResult r = run(p, s, o, 2);
  EXPECT_EQ(r.oracle_calls, 60u);
  for (std::size_t k = 0; k < 20; ++k) EXPECT_EQ(r.records[k].oracle_calls, 3 * (k + 1));
  // The terminal row is not billed.
  EXPECT_EQ(r.records.back().oracle_calls, 60u);

  o.init.kind = InitKind::kMiniBatch;
  o.init.b0 = 7;
  const RunResult mb = run(p, s, o, 2);
  EXPECT_EQ(mb.oracle_calls, 7u + 3u * 19u);

  o.init.b0.reset();
  // F(x0) - F* = (1 + 1) / 2 * 3 = 3, b0 = ceil(9 / 3) = 3.
  EXPECT_EQ(run(p, s, o, 2).oracle_calls, 3u + 3u * 19u);

  o.init = InitStrategy{};
  o.budget = 31;
  const RunResult capped = run(p, s, o, 2);
  EXPECT_EQ(capped.steps, 10u);
  EXPECT_EQ(capped.oracle_calls, 30u);
  EXPECT_EQ(capped.records.size(), 11u);
}

TEST(Run, RecordsAreConsistent) {
  const CompositeProblem p = build_quadratic_instance(1.0, 2.0, 4.0, 3);
  const Schedule s = Schedule::constant(ScheduleVariant::kConstantThm51, 1.0, 4.0, 1.0, 100);
  RunOptions o;
  o.x0 = Point(3, 0.5);
  o.K = 100;
  const RunResult r = run(p, s, o, 3);
  const double a = s.lyapunov_a();
  ASSERT_EQ(r.records.size(), 101u);
  for (std::size_t k = 0; k <= 100; ++k) {
    const IterateRecord& row = r.records[k];
    EXPECT_EQ(row.k, k);
    EXPECT_NEAR(row.phi, row.F_gap + a * row.delta, 1e-12 * (1.0 + row.phi));
    EXPECT_EQ(row.M, s.at(k).M);
    EXPECT_GE(row.F_gap, 0.0);
  }
  EXPECT_EQ(r.records.back().R, 0.0);
  EXPECT_EQ(r.floor_violations, 0u);
  EXPECT_FALSE(r.f_gap_relative);

  const RunResult again = run(p, s, o, 3);
  EXPECT_EQ(again.x_final, r.x_final);
  EXPECT_EQ(again.output->index, r.output->index);
  const RunResult other = run(p, s, o, 4);
  EXPECT_NE(other.x_final, r.x_final);
}

// With the zero init m_0 = 0, so Delta_0 = ||grad f(x_0)||^2 exactly.
TEST(Run, ZeroInitTrackingError) {
  const CompositeProblem p = build_quadratic_instance(2.0, 1.0, 25.0, 4);
  RunOptions o;
  o.x0 = Point{1.0, 2.0, 3.0, 4.0};
  o.K = 5;
  o.init.kind = InitKind::kNonCompositeZero;
  const RunResult r = run(p, Schedule::manual(50.0, 0.2, 2.0), o, 9);
  const double expected = 4.0 * (1 + 4 + 9 + 16);
  EXPECT_NEAR(r.records[0].delta, expected, 1e-12 * expected);
  EXPECT_NEAR(initial_tracking_error(p, o.x0, o.init, 1), expected, 1e-12);
  InitStrategy g0{InitKind::kCompositeG0, std::nullopt, std::nullopt};
  EXPECT_NEAR(initial_tracking_error(p, o.x0, g0, 5), 5.0, 1e-12);
  // Phi_0 = F(x0) + a * Delta_0 with F* = 0.
  EXPECT_NEAR(initial_potential(p, o.x0, g0, 0.5, 1), 1.5 * 30.0 + 0.5 * 25.0, 1e-12);
}

// Momentum averaging lowers the tracking error below the raw noise level.
TEST(Run, MomentumReducesTrackingError) {
  const CompositeProblem p = build_quadratic_instance(1.0, 0.0, 25.0, 5);
  RunOptions o;
  o.x0 = Point(5, 0.0);
  o.K = 400;
  o.init.kind = InitKind::kCompositeG0;
  double mean_vanilla = 0.0, mean_momentum = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    o.method = Method::kVanilla;
    const RunResult v = run(p, Schedule::manual(100.0, 1.0, 1.0), o, seed);
    o.method = Method::kMomentum;
    const RunResult m = run(p, Schedule::manual(100.0, 0.05, 1.0), o, seed);
    for (std::size_t k = 200; k < 400; ++k) {
      mean_vanilla += v.records[k].delta;
      mean_momentum += m.records[k].delta;
    }
  }
  EXPECT_GT(mean_vanilla / 4000.0, 20.0);
  EXPECT_LT(mean_momentum / 4000.0, 5.0);
}

TEST(Run, TimeVaryingUsesInverseMWeights) {
  const CompositeProblem p = build_quadratic_instance(1.0, 1.0, 100.0, 2);
  RunOptions o;
  o.x0 = Point{1.0, 1.0};
  o.K = 200;
  o.init.kind = InitKind::kCompositeG0;
  const Schedule s = Schedule::timevarying(1.0, 100.0, 1.0);
  double mean_index = 0.0;
  const int n = 2000;
  for (int seed = 0; seed < n; ++seed) {
    o.keep_records = false;
    mean_index += static_cast<double>(run(p, s, o, seed).output->index);
  }
  mean_index /= n;
  // Uniform would give 100.5; weights 1/M_k ~ k^(-1/2) pull it to ~67.
  EXPECT_LT(mean_index, 80.0);
  EXPECT_GT(mean_index, 55.0);
}

TEST(Run, InexactPathRuns) {
  const CompositeProblem p = build_quadratic_instance(1.0, 4.0, 1.0, 3);
  RunOptions o;
  o.x0 = Point(3, 1.0);
  o.K = 30;
  InexactProxOptions inner;
  inner.target_S = 0.1;
  o.inexact = inner;
  const RunResult r = run(p, Schedule::manual(10.0, 0.5, 1.0), o, 5);
  EXPECT_EQ(r.steps, 30u);
  EXPECT_LT(r.records.back().F_gap, r.records.front().F_gap);
}

}  // namespace
