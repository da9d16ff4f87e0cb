#include "spgm/harness/numeric_prox.hpp"

#include <algorithm>
#include <cmath>

namespace spgm::harness {

namespace {

using Real = long double;

constexpr int kBisectionSteps = 400;
constexpr int kGradientSteps = 200;

// Projected gradient descent on <m,x> + (a/2)||x||^2 + (M/2)||x - c||^2 with
// step 1/(2(M+a)); the error halves every step.
Point projected_descent(const ProxQuery& q, Real a, const Point* lo, const Point* hi) {
  const std::size_t d = q.center.size();
  std::vector<Real> x(q.center.begin(), q.center.end());
  const Real M = q.M;
  const Real step = 1.0L / (2.0L * (M + a));
  for (int t = 0; t < kGradientSteps; ++t) {
    for (std::size_t i = 0; i < d; ++i) {
      const Real g = static_cast<Real>(q.m[i]) + a * x[i] + M * (x[i] - q.center[i]);
      x[i] -= step * g;
      if (lo != nullptr) x[i] = std::clamp<Real>(x[i], (*lo)[i], (*hi)[i]);
    }
  }
  return Point(x.begin(), x.end());
}

// Smallest root of a non-decreasing function on [lo, hi].
template <class F>
Real bisect(F right_derivative, Real lo, Real hi) {
  for (int t = 0; t < kBisectionSteps; ++t) {
    const Real mid = 0.5L * (lo + hi);
    if (right_derivative(mid) >= 0.0L) hi = mid;
    else lo = mid;
  }
  return 0.5L * (lo + hi);
}

Point l1_prox(const ProxQuery& q, Real lambda) {
  Point x(q.center.size());
  const Real M = q.M;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Real m = q.m[i];
    const Real c = q.center[i];
    // right derivative of m x + lambda |x| + (M/2)(x - c)^2
    auto slope = [&](Real t) { return m + (t >= 0.0L ? lambda : -lambda) + M * (t - c); };
    const Real width = std::abs(c) + (std::abs(m) + lambda) / M + 1.0L;
    x[i] = static_cast<double>(bisect(slope, -width, width));
  }
  return x;
}

// min (M/2)||x - v||^2 + lambda ||x||_inf over one group: for a bound t on
// ||x||_inf the best x is clamp(v, -t, t), and the cost in t is convex with
// derivative lambda - M sum (|v_i| - t)_+.
void linf_group(const std::vector<Real>& v, Real M, Real lambda, double* out) {
  Real vmax = 0.0L;
  for (Real vi : v) vmax = std::max(vmax, std::abs(vi));
  auto slope = [&](Real t) {
    Real s = 0.0L;
    for (Real vi : v) s += std::max(std::abs(vi) - t, 0.0L);
    return lambda - M * s;
  };
  const Real t = slope(0.0L) >= 0.0L ? 0.0L : bisect(slope, 0.0L, vmax);
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = static_cast<double>(std::clamp(v[i], -t, t));
  }
}

Point group_prox(const ProxQuery& q, const GroupLinf1Psi& g) {
  Point x(q.center.size());
  const Real M = q.M;
  std::size_t offset = 0;
  for (std::size_t size : g.group_sizes) {
    std::vector<Real> v(size);
    for (std::size_t i = 0; i < size; ++i) {
      v[i] = static_cast<Real>(q.center[offset + i]) - static_cast<Real>(q.m[offset + i]) / M;
    }
    linf_group(v, M, g.lambda, x.data() + offset);
    offset += size;
  }
  return x;
}

}  // namespace

Point numeric_prox(const ProxQuery& query, const ProxPart& psi) {
  query.validate();
  psi.check_dimension(query.center.size());
  const auto& kind = psi.kind();
  if (std::holds_alternative<ZeroPsi>(kind)) return projected_descent(query, 0.0L, nullptr, nullptr);
  if (const auto* q = std::get_if<QuadraticPsi>(&kind)) {
    return projected_descent(query, q->a, nullptr, nullptr);
  }
  if (const auto* b = std::get_if<BoxPsi>(&kind)) {
    return projected_descent(query, 0.0L, &b->lo, &b->hi);
  }
  if (const auto* l = std::get_if<L1Psi>(&kind)) return l1_prox(query, l->lambda);
  if (const auto* g = std::get_if<GroupLinf1Psi>(&kind)) return group_prox(query, *g);
  throw UnsupportedProx("no numeric oracle for psi kind '" + std::string(psi.name()) + "'");
}

double relative_error(std::span<const double> x, std::span<const double> reference) {
  Real diff = 0.0L;
  Real norm = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Real e = static_cast<Real>(x[i]) - reference[i];
    diff += e * e;
    norm += static_cast<Real>(reference[i]) * reference[i];
  }
  return static_cast<double>(std::sqrt(diff) / std::max(1.0L, std::sqrt(norm)));
}

}  // namespace spgm::harness
