#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "spgm/harness/numeric_prox.hpp"
#include "spgm/kernels.hpp"
#include "spgm/prox.hpp"

namespace {

using namespace spgm;

double norm(std::span<const double> v) { return std::sqrt(kernels::squared_norm(v)); }

// Random query and psi of the named closed-form kind.
struct Case {
  ProxQuery query;
  ProxPart psi;
};

Case random_case(RandomStream& rng, std::string_view kind) {
  const std::size_t d = 1 + static_cast<std::size_t>(rng.uniform() * 7.0);
  Case c;
  c.query.M = std::exp(std::log(0.05) + rng.uniform() * std::log(400.0));
  for (std::size_t i = 0; i < d; ++i) {
    c.query.m.push_back(3.0 * rng.normal());
    c.query.center.push_back(3.0 * rng.normal());
  }
  if (kind == "zero") {
    c.psi = ProxPart::zero();
  } else if (kind == "quadratic") {
    c.psi = ProxPart::quadratic(5.0 * rng.uniform());
  } else if (kind == "l1") {
    c.psi = ProxPart::l1(5.0 * rng.uniform());
  } else if (kind == "group_linf1") {
    std::vector<std::size_t> groups;
    for (std::size_t left = d; left > 0;) {
      const std::size_t g = std::min(left, 1 + static_cast<std::size_t>(rng.uniform() * 3.0));
      groups.push_back(g);
      left -= g;
    }
    c.psi = ProxPart::group_linf1(5.0 * rng.uniform(), groups);
  } else {
    Point lo(d), hi(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double mid = 2.0 * rng.normal();
      lo[i] = mid - rng.uniform();
      hi[i] = mid + rng.uniform();
    }
    c.psi = ProxPart::box(lo, hi);
  }
  return c;
}

const std::vector<std::string_view> kKinds{"zero", "quadratic", "l1", "group_linf1", "box"};

TEST(ProxExact, QuadraticExamples) {
  const auto r0 = prox_exact(ProxQuery{Point{0.0}, Point{0.0}, 3.0}, ProxPart::quadratic(2.0));
  EXPECT_EQ(r0.x_plus, Point{0.0});

  const auto r = prox_exact(ProxQuery{Point{6.0}, Point{3.0}, 2.0}, ProxPart::quadratic(4.0));
  EXPECT_NEAR(r.x_plus[0], 0.0, 1e-15);
  // Fine-grid minimization of Omega(x) = 6x + 2x^2 + (x - 3)^2.
  double best_x = 0.0, best = std::numeric_limits<double>::infinity();
  for (int i = -50000; i <= 50000; ++i) {
    const double x = i * 1e-4;
    const double v = 6.0 * x + 2.0 * x * x + (x - 3.0) * (x - 3.0);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  EXPECT_NEAR(r.x_plus[0], best_x, 1e-4);
}

// With m = L x_k + xi the step is the linear recursion of the lower-bound
// instance.
TEST(ProxExact, LowerBoundRecursion) {
  RandomStream rng(3, StreamId::kReplication);
  const double L = 1.0, a = 1e4;
  for (double M : {1.0, 10.0, 1e4}) {
    Point x(5), m(5), xi(5);
    for (std::size_t i = 0; i < 5; ++i) {
      x[i] = rng.normal();
      xi[i] = 5.0 * rng.normal();
      m[i] = L * x[i] + xi[i];
    }
    const auto r = prox_exact(ProxQuery{m, x, M}, ProxPart::quadratic(a));
    for (std::size_t i = 0; i < 5; ++i) {
      const double expected = (M - L) / (M + a) * x[i] - xi[i] / (M + a);
      EXPECT_NEAR(r.x_plus[i], expected, 1e-13 * (1.0 + std::abs(expected)));
    }
  }
}

TEST(ProxExact, L1Example) {
  const auto r = prox_exact(ProxQuery{Point{0.0, 0.0}, Point{2.0, -0.5}, 1.0}, ProxPart::l1(1.0));
  EXPECT_EQ(r.x_plus, (Point{1.0, 0.0}));
  const Point numeric =
      harness::numeric_prox(ProxQuery{Point{0.0, 0.0}, Point{2.0, -0.5}, 1.0}, ProxPart::l1(1.0));
  EXPECT_NEAR(numeric[0], 1.0, 1e-12);
  EXPECT_NEAR(numeric[1], 0.0, 1e-12);
}

TEST(ProxExact, GroupAndBoxExamples) {
  // v = (3, -1, 0.5), lambda/M = 1: max-norm prox shrinks the largest entry.
  const auto g = prox_exact(ProxQuery{Point(3, 0.0), Point{3.0, -1.0, 0.5}, 1.0},
                            ProxPart::group_linf1(1.0, {3}));
  EXPECT_NEAR(g.x_plus[0], 2.0, 1e-15);
  EXPECT_NEAR(g.x_plus[1], -1.0, 1e-15);
  EXPECT_NEAR(g.x_plus[2], 0.5, 1e-15);
  // Large lambda zeroes the group.
  const auto z = prox_exact(ProxQuery{Point(2, 0.0), Point{0.3, -0.2}, 1.0},
                            ProxPart::group_linf1(1.0, {2}));
  EXPECT_EQ(z.x_plus, (Point{0.0, 0.0}));

  const auto b = prox_exact(ProxQuery{Point{0.0, 0.0}, Point{2.0, -3.0}, 1.0},
                            ProxPart::box(Point{-1.0, -1.0}, Point{1.0, 1.0}));
  EXPECT_EQ(b.x_plus, (Point{1.0, -1.0}));
}

TEST(ProxExact, RejectsInvalidInput) {
  EXPECT_THROW(ProxPart::quadratic(-1.0), InvalidInput);
  EXPECT_THROW(ProxPart::l1(-0.1), InvalidInput);
  EXPECT_THROW(ProxPart::group_linf1(-1.0, {1}), InvalidInput);
  EXPECT_THROW(ProxPart::group_linf1(1.0, {2, 0}), InvalidInput);
  EXPECT_THROW(ProxPart::box(Point{1.0}, Point{0.0}), InvalidInput);
  EXPECT_THROW(prox_exact(ProxQuery{Point{1.0}, Point{1.0}, 0.0}, ProxPart::zero()),
               InvalidParameter);
  EXPECT_THROW(prox_exact(ProxQuery{Point{1.0}, Point{1.0, 2.0}, 1.0}, ProxPart::zero()),
               InvalidInput);
  EXPECT_THROW(prox_exact(ProxQuery{Point{1.0, 1.0}, Point{1.0, 2.0}, 1.0},
                          ProxPart::group_linf1(1.0, {3})),
               InvalidInput);
  SmoothPsi smooth{[](std::span<const double>) { return 0.0; },
                   [](std::span<const double>, std::span<double> out) {
                     std::fill(out.begin(), out.end(), 0.0);
                   },
                   1.0};
  EXPECT_THROW(prox_exact(ProxQuery{Point{1.0}, Point{1.0}, 1.0}, ProxPart::smooth(smooth)),
               UnsupportedProx);
}

// Agreement with the long-double numeric minimizer on random queries.
TEST(ProxExact, MatchesNumericMinimizer) {
  RandomStream rng(21, StreamId::kReplication);
  for (auto kind : kKinds) {
    for (int t = 0; t < 100; ++t) {
      const Case c = random_case(rng, kind);
      const Point exact = prox_exact(c.query, c.psi).x_plus;
      const Point numeric = harness::numeric_prox(c.query, c.psi);
      EXPECT_LE(harness::relative_error(exact, numeric), 1e-8) << kind;
    }
  }
}

// Omega never increases and the certifying subgradient makes the exact
// output stationary up to rounding.
TEST(ProxExact, DecreaseAndStationarity) {
  RandomStream rng(22, StreamId::kReplication);
  for (auto kind : kKinds) {
    for (int t = 0; t < 200; ++t) {
      const Case c = random_case(rng, kind);
      const ProxResult r = prox_exact(c.query, c.psi);
      EXPECT_GE(r.omega_decrease, 0.0);
      const double at_center = omega_value(c.query, c.psi, c.query.center);
      if (std::isfinite(at_center)) {
        EXPECT_LE(omega_value(c.query, c.psi, r.x_plus),
                  at_center + 1e-12 * (1.0 + std::abs(at_center)));
      }
      const double scale = kernels::squared_norm(c.query.m) +
                           c.query.M * c.query.M * kernels::squared_norm(c.query.center) + 1.0;
      EXPECT_LE(r.stationarity_sq, 1e-24 * scale * 1e4) << kind;
      EXPECT_GE(r.stationarity_sq, 0.0);
    }
  }
}

// ||x(m1) - x(m2)|| <= ||m1 - m2|| / M for fixed center.
TEST(ProxExact, Nonexpansive) {
  RandomStream rng(23, StreamId::kReplication);
  for (auto kind : kKinds) {
    for (int t = 0; t < 200; ++t) {
      const Case c = random_case(rng, kind);
      ProxQuery other = c.query;
      for (double& v : other.m) v += 2.0 * rng.normal();
      const Point x1 = prox_exact(c.query, c.psi).x_plus;
      const Point x2 = prox_exact(other, c.psi).x_plus;
      const double lhs = std::sqrt(kernels::squared_distance(x1, x2));
      const double rhs = std::sqrt(kernels::squared_distance(c.query.m, other.m)) / c.query.M;
      EXPECT_LE(lhs, rhs * (1.0 + 1e-12) + 1e-14) << kind;
    }
  }
}

TEST(OmegaEval, Examples) {
  const ProxQuery q{Point{1.0, -2.0}, Point{3.0, 4.0}, 2.0};
  const OmegaEval at_center = omega_eval(q, ProxPart::zero(), q.center);
  EXPECT_DOUBLE_EQ(at_center.value, 3.0 - 8.0);
  EXPECT_EQ(at_center.grad, q.m);

  const ProxPart quad = ProxPart::quadratic(3.0);
  const Point x = prox_exact(q, quad).x_plus;
  EXPECT_LE(norm(omega_eval(q, quad, x).grad), 1e-10 * (norm(q.m) + q.M * norm(q.center)));

  // Certifying subgradient at the l1 prox output, arbitrary one elsewhere.
  const ProxPart l1 = ProxPart::l1(5.0);
  const Point xl = prox_exact(q, l1).x_plus;
  EXPECT_LE(norm(omega_eval(q, l1, xl).grad), 1e-12);
  EXPECT_GT(norm(omega_eval(q, l1, Point{0.0, 0.0}).grad), 0.0);
  EXPECT_THROW(omega_eval(q, l1, Point{0.0, NAN}), InvalidInput);
}

// Central finite differences of the value wherever psi is differentiable.
TEST(OmegaEval, GradientMatchesFiniteDifferences) {
  RandomStream rng(24, StreamId::kReplication);
  for (int t = 0; t < 200; ++t) {
    const bool quadratic = t % 2 == 0;
    const Case c = random_case(rng, quadratic ? "quadratic" : "zero");
    Point x(c.query.center.size());
    for (double& v : x) v = 3.0 * rng.normal();
    const OmegaEval e = omega_eval(c.query, c.psi, x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double h = 1e-5 * (1.0 + std::abs(x[i]));
      Point xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd =
          (omega_value(c.query, c.psi, xp) - omega_value(c.query, c.psi, xm)) / (2.0 * h);
      EXPECT_NEAR(e.grad[i], fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

// Projection onto the l1 ball by enumerating faces: for each support and
// sign pattern project onto the face's hyperplane and keep the closest
// feasible candidate.
Point brute_force_l1_projection(const Point& y, double r) {
  double n1 = 0.0;
  for (double v : y) n1 += std::abs(v);
  if (n1 <= r) return y;
  const std::size_t n = y.size();
  Point best;
  double best_dist = std::numeric_limits<double>::infinity();
  std::size_t patterns = 1;
  for (std::size_t i = 0; i < n; ++i) patterns *= 3;
  for (std::size_t code = 0; code < patterns; ++code) {
    std::vector<int> s(n);
    std::size_t c = code, support = 0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<int>(c % 3) - 1;
      c /= 3;
      if (s[i] != 0) ++support;
    }
    if (support == 0) continue;
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) sy += s[i] * y[i];
    const double shift = (sy - r) / static_cast<double>(support);
    Point x(n, 0.0);
    bool feasible = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (s[i] == 0) continue;
      x[i] = y[i] - shift * s[i];
      if (s[i] * x[i] < -1e-12) feasible = false;
    }
    if (!feasible) continue;
    const double dist = kernels::squared_distance(x, y);
    if (dist < best_dist) {
      best_dist = dist;
      best = x;
    }
  }
  return best;
}

TEST(ProjectL1Ball, MatchesBruteForce) {
  RandomStream rng(25, StreamId::kReplication);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 6.0);
    Point y(n);
    for (double& v : y) v = 2.0 * rng.normal();
    const double r = 3.0 * rng.uniform();
    const Point fast = project_l1_ball(y, r);
    const Point slow = brute_force_l1_projection(y, r);
    ASSERT_EQ(fast.size(), slow.size());
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(fast[i], slow[i], 1e-12);
  }
  EXPECT_THROW(project_l1_ball(Point{1.0}, -1.0), InvalidInput);
}

TEST(ProxInexact, NoiselessMatchesExact) {
  const ProxPart psi = ProxPart::quadratic(4.0);
  const ProxQuery q{Point{6.0, -1.0, 2.0}, Point{3.0, 0.5, -1.0}, 2.0};
  InexactProxOptions options;
  options.target_S = 1e-12;
  options.max_iters = 200;
  options.stop_on_criterion = false;
  RandomStream rng(1, StreamId::kInnerProx);
  const ProxResult r = prox_inexact_sgd(q, psi, options, rng);
  const Point exact = prox_exact(q, psi).x_plus;
  for (std::size_t i = 0; i < exact.size(); ++i) EXPECT_NEAR(r.x_plus[i], exact[i], 1e-6);
  EXPECT_TRUE(r.criterion_verified);
}

TEST(ProxInexact, InfiniteTargetTakesNoSteps) {
  const ProxPart psi = ProxPart::quadratic(4.0).with_gradient_noise(1.0);
  const ProxQuery q{Point{6.0}, Point{3.0}, 2.0};
  InexactProxOptions options;
  options.target_S = std::numeric_limits<double>::infinity();
  RandomStream rng(1, StreamId::kInnerProx);
  const ProxResult r = prox_inexact_sgd(q, psi, options, rng);
  EXPECT_EQ(r.inner_iterations, 0u);
  EXPECT_EQ(r.x_plus, q.center);
  EXPECT_EQ(r.omega_decrease, 0.0);
}

TEST(ProxInexact, BudgetExample) {
  // kappa = 3: burn-in ceil(3 ln 12) = 8, window ceil(2 * 3 * 1 / 0.1) = 60.
  EXPECT_EQ(inexact_default_iterations(2.0, 4.0, 1.0, 0.1), 68u);
  EXPECT_NEAR(inexact_reference_budget(2.0, 4.0, 1.0, 0.1), 3.0 * std::log(3.0) + 30.0, 1e-12);
  EXPECT_LE(68.0, 4.0 * inexact_reference_budget(2.0, 4.0, 1.0, 0.1));
  EXPECT_THROW(inexact_default_iterations(0.0, 4.0, 1.0, 0.1), InvalidParameter);
  EXPECT_THROW(inexact_default_iterations(2.0, 4.0, 1.0, 0.0), InvalidParameter);
}

TEST(ProxInexact, NeverIncreasesOmega) {
  RandomStream rng(26, StreamId::kReplication);
  for (int t = 0; t < 100; ++t) {
    const Case c = random_case(rng, "quadratic");
    const ProxPart noisy = c.psi.with_gradient_noise(10.0 * rng.uniform());
    InexactProxOptions options;
    options.target_S = 0.01 + rng.uniform();
    options.max_iters = 1 + static_cast<std::size_t>(rng.uniform() * 20.0);
    RandomStream inner(t, StreamId::kInnerProx);
    const ProxResult r = prox_inexact_sgd(c.query, noisy, options, inner);
    EXPECT_LE(omega_value(c.query, noisy, r.x_plus), omega_value(c.query, noisy, c.query.center));
    EXPECT_LE(r.inner_iterations, *options.max_iters);
  }
}

TEST(ProxInexact, HandlesUserSmoothPsi) {
  // psi(x) = sum log cosh(x_i): 1-smooth, convex.
  SmoothPsi s{[](std::span<const double> x) {
                double v = 0.0;
                for (double xi : x) v += std::log(std::cosh(xi));
                return v;
              },
              [](std::span<const double> x, std::span<double> out) {
                for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::tanh(x[i]);
              },
              1.0};
  const ProxPart psi = ProxPart::smooth(s);
  const ProxQuery q{Point{1.0, -2.0}, Point{0.5, 0.5}, 3.0};
  InexactProxOptions options;
  options.target_S = 1e-10;
  options.max_iters = 500;
  RandomStream rng(2, StreamId::kInnerProx);
  const ProxResult r = prox_inexact_sgd(q, psi, options, rng);
  EXPECT_LE(r.stationarity_sq, 1e-10);
  EXPECT_TRUE(r.criterion_verified);
  EXPECT_THROW(prox_inexact_sgd(q, ProxPart::l1(1.0), options, rng), UnsupportedProx);
}

}  // namespace
