#include "spgm/prox.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "spgm/kernels.hpp"

namespace spgm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_nonnegative(double v, std::string_view what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw InvalidInput(std::string(what) + " must be finite and >= 0");
  }
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// v = center - m / M
Point shifted_center(const ProxQuery& q) {
  Point v(q.center.size());
  kernels::axpby(1.0, q.center, -1.0 / q.M, q.m, v);
  return v;
}

}  // namespace

// ---------------------------------------------------------------- ProxPart

ProxPart ProxPart::zero() { return ProxPart(ZeroPsi{}); }

ProxPart ProxPart::quadratic(double a) {
  require_nonnegative(a, "quadratic psi weight a");
  return ProxPart(QuadraticPsi{a});
}

ProxPart ProxPart::l1(double lambda) {
  require_nonnegative(lambda, "l1 psi weight lambda");
  return ProxPart(L1Psi{lambda});
}

ProxPart ProxPart::group_linf1(double lambda,
                               std::vector<std::size_t> group_sizes) {
  require_nonnegative(lambda, "group l_inf,1 psi weight lambda");
  if (group_sizes.empty()) throw InvalidInput("group layout is empty");
  for (std::size_t s : group_sizes) {
    if (s == 0) throw InvalidInput("group layout contains an empty group");
  }
  return ProxPart(GroupLinf1Psi{lambda, std::move(group_sizes)});
}

ProxPart ProxPart::box(Point lo, Point hi) {
  if (lo.size() != hi.size()) throw InvalidInput("box bounds differ in size");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (std::isnan(lo[i]) || std::isnan(hi[i]) || lo[i] > hi[i]) {
      throw InvalidInput("box requires lo <= hi componentwise");
    }
  }
  return ProxPart(BoxPsi{std::move(lo), std::move(hi)});
}

ProxPart ProxPart::smooth(SmoothPsi oracle) {
  if (!oracle.value || !oracle.gradient) {
    throw InvalidInput("smooth psi needs value and gradient oracles");
  }
  require_nonnegative(oracle.L_psi, "smooth psi constant L_psi");
  return ProxPart(std::move(oracle));
}

ProxPart ProxPart::with_gradient_noise(double sigma2) const {
  require_nonnegative(sigma2, "psi gradient noise sigma_psi^2");
  ProxPart copy = *this;
  copy.gradient_noise_ = sigma2;
  return copy;
}

std::string_view ProxPart::name() const {
  return std::visit(Overloaded{
                        [](const ZeroPsi&) { return std::string_view("zero"); },
                        [](const QuadraticPsi&) { return std::string_view("quadratic"); },
                        [](const L1Psi&) { return std::string_view("l1"); },
                        [](const GroupLinf1Psi&) { return std::string_view("group_linf1"); },
                        [](const BoxPsi&) { return std::string_view("box"); },
                        [](const SmoothPsi&) { return std::string_view("smooth"); },
                    },
                    kind_);
}

bool ProxPart::has_closed_form() const {
  return !std::holds_alternative<SmoothPsi>(kind_);
}

bool ProxPart::is_differentiable() const {
  return std::holds_alternative<ZeroPsi>(kind_) ||
         std::holds_alternative<QuadraticPsi>(kind_) ||
         std::holds_alternative<SmoothPsi>(kind_);
}

double ProxPart::smoothness() const {
  if (std::holds_alternative<ZeroPsi>(kind_)) return 0.0;
  if (const auto* q = std::get_if<QuadraticPsi>(&kind_)) return q->a;
  if (const auto* s = std::get_if<SmoothPsi>(&kind_)) return s->L_psi;
  throw UnsupportedProx("psi kind '" + std::string(name()) +
                        "' is not differentiable");
}

void ProxPart::check_dimension(std::size_t d) const {
  if (const auto* b = std::get_if<BoxPsi>(&kind_)) {
    if (b->lo.size() != d) {
      throw InvalidInput("box bounds have dimension " +
                         std::to_string(b->lo.size()) + ", problem has " +
                         std::to_string(d));
    }
  }
  if (const auto* g = std::get_if<GroupLinf1Psi>(&kind_)) {
    const std::size_t total =
        std::accumulate(g->group_sizes.begin(), g->group_sizes.end(), std::size_t{0});
    if (total != d) {
      throw InvalidInput("group layout covers " + std::to_string(total) +
                         " coordinates, problem has " + std::to_string(d));
    }
  }
}

double ProxPart::value(std::span<const double> x) const {
  return std::visit(
      Overloaded{
          [](const ZeroPsi&) { return 0.0; },
          [&](const QuadraticPsi& q) { return 0.5 * q.a * kernels::squared_norm(x); },
          [&](const L1Psi& l) {
            double s = 0.0;
            for (double v : x) s += std::abs(v);
            return l.lambda * s;
          },
          [&](const GroupLinf1Psi& g) {
            double s = 0.0;
            std::size_t offset = 0;
            for (std::size_t size : g.group_sizes) {
              double mx = 0.0;
              for (std::size_t i = offset; i < offset + size; ++i) {
                mx = std::max(mx, std::abs(x[i]));
              }
              s += mx;
              offset += size;
            }
            return g.lambda * s;
          },
          [&](const BoxPsi& b) {
            for (std::size_t i = 0; i < x.size(); ++i) {
              if (x[i] < b.lo[i] || x[i] > b.hi[i]) {
                return std::numeric_limits<double>::infinity();
              }
            }
            return 0.0;
          },
          [&](const SmoothPsi& s) { return s.value(x); },
      },
      kind_);
}

void ProxPart::gradient(std::span<const double> x, std::span<double> out) const {
  std::visit(Overloaded{
                 [&](const ZeroPsi&) { std::fill(out.begin(), out.end(), 0.0); },
                 [&](const QuadraticPsi& q) {
                   for (std::size_t i = 0; i < x.size(); ++i) out[i] = q.a * x[i];
                 },
                 [&](const SmoothPsi& s) { s.gradient(x, out); },
                 [&](const auto&) {
                   throw UnsupportedProx("psi kind '" + std::string(name()) +
                                         "' has no gradient");
                 },
             },
             kind_);
}

void ProxPart::subgradient(std::span<const double> x, std::span<double> out) const {
  if (is_differentiable()) {
    gradient(x, out);
    return;
  }
  std::visit(Overloaded{
                 [&](const L1Psi& l) {
                   for (std::size_t i = 0; i < x.size(); ++i) out[i] = l.lambda * sign(x[i]);
                 },
                 [&](const GroupLinf1Psi& g) {
                   std::fill(out.begin(), out.end(), 0.0);
                   std::size_t offset = 0;
                   for (std::size_t size : g.group_sizes) {
                     std::size_t arg = offset;
                     for (std::size_t i = offset; i < offset + size; ++i) {
                       if (std::abs(x[i]) > std::abs(x[arg])) arg = i;
                     }
                     out[arg] = g.lambda * sign(x[arg]);
                     offset += size;
                   }
                 },
                 // zero lies in the normal cone of every feasible point
                 [&](const BoxPsi&) { std::fill(out.begin(), out.end(), 0.0); },
                 [&](const auto&) {},
             },
             kind_);
}

void ProxPart::stochastic_gradient(std::span<const double> x, RandomStream& rng,
                                   std::span<double> out) const {
  gradient(x, out);
  if (gradient_noise_ > 0.0) {
    const double sd = std::sqrt(gradient_noise_ / static_cast<double>(x.size()));
    for (double& v : out) v += sd * rng.normal();
  }
}

// --------------------------------------------------------------- ProxQuery

void ProxQuery::validate() const {
  if (!(M > 0.0) || !std::isfinite(M)) {
    throw InvalidParameter("prox coefficient M must be finite and > 0");
  }
  require_dimension(m, center.size(), "prox vector m");
  require_finite(m, "prox vector m");
  require_finite(center, "prox center");
}

double omega_value(const ProxQuery& query, const ProxPart& psi,
                   std::span<const double> x) {
  return kernels::dot(query.m, x) + psi.value(x) +
         0.5 * query.M * kernels::squared_distance(x, query.center);
}

// ----------------------------------------------------------- closed forms

Point project_l1_ball(std::span<const double> y, double radius) {
  if (!(radius >= 0.0)) throw InvalidInput("l1 ball radius must be >= 0");
  double norm1 = 0.0;
  for (double v : y) norm1 += std::abs(v);
  Point out(y.begin(), y.end());
  if (norm1 <= radius) return out;

  std::vector<double> u(y.size());
  std::transform(y.begin(), y.end(), u.begin(), [](double v) { return std::abs(v); });
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = sign(y[i]) * std::max(std::abs(y[i]) - theta, 0.0);
  }
  return out;
}

namespace {

struct ExactSolution {
  Point x;
  Point g;  // certifying psi-subgradient
};

ExactSolution solve_exact(const ProxQuery& q, const ProxPart& psi) {
  const std::size_t d = q.center.size();
  ExactSolution s{Point(d), Point(d, 0.0)};
  std::visit(
      Overloaded{
          [&](const ZeroPsi&) { s.x = shifted_center(q); },
          [&](const QuadraticPsi& quad) {
            const double denom = q.M + quad.a;
            kernels::axpby(q.M / denom, q.center, -1.0 / denom, q.m, s.x);
            for (std::size_t i = 0; i < d; ++i) s.g[i] = quad.a * s.x[i];
          },
          [&](const L1Psi& l) {
            const Point v = shifted_center(q);
            kernels::soft_threshold(v, l.lambda / q.M, s.x);
            for (std::size_t i = 0; i < d; ++i) {
              s.g[i] = s.x[i] != 0.0 ? l.lambda * sign(s.x[i])
                                     : std::clamp(q.M * v[i], -l.lambda, l.lambda);
            }
          },
          [&](const GroupLinf1Psi& grp) {
            const Point v = shifted_center(q);
            if (grp.lambda == 0.0) {
              s.x = v;
              return;
            }
            const double tau = grp.lambda / q.M;
            std::size_t offset = 0;
            for (std::size_t size : grp.group_sizes) {
              Point scaled(size);
              for (std::size_t i = 0; i < size; ++i) scaled[i] = v[offset + i] / tau;
              const Point p = project_l1_ball(scaled, 1.0);
              for (std::size_t i = 0; i < size; ++i) {
                s.x[offset + i] = v[offset + i] - tau * p[i];
                s.g[offset + i] = grp.lambda * p[i];
              }
              offset += size;
            }
          },
          [&](const BoxPsi& b) {
            const Point v = shifted_center(q);
            kernels::clamp(v, b.lo, b.hi, s.x);
            for (std::size_t i = 0; i < d; ++i) s.g[i] = q.M * (v[i] - s.x[i]);
          },
          [&](const SmoothPsi&) {
            throw UnsupportedProx(
                "smooth psi has no closed-form prox; use prox_inexact_sgd");
          },
      },
      psi.kind());
  return s;
}

Point omega_gradient(const ProxQuery& q, std::span<const double> psi_grad,
                     std::span<const double> x) {
  Point grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    grad[i] = q.m[i] + psi_grad[i] + q.M * (x[i] - q.center[i]);
  }
  return grad;
}

}  // namespace

ProxResult prox_exact(const ProxQuery& query, const ProxPart& psi) {
  query.validate();
  psi.check_dimension(query.center.size());
  ExactSolution s = solve_exact(query, psi);

  ProxResult result;
  const Point grad = omega_gradient(query, s.g, s.x);
  result.stationarity_sq = std::max(0.0, kernels::squared_norm(grad));
  const double decrease =
      omega_value(query, psi, query.center) - omega_value(query, psi, s.x);
  // exact minimizer: a negative difference is rounding
  result.omega_decrease = std::isnan(decrease) ? 0.0 : std::max(0.0, decrease);
  result.x_plus = std::move(s.x);
  result.psi_subgradient = std::move(s.g);
  return result;
}

OmegaEval omega_eval(const ProxQuery& query, const ProxPart& psi,
                     std::span<const double> x) {
  query.validate();
  require_dimension(x, query.center.size(), "omega_eval point");
  require_finite(x, "omega_eval point");

  Point psi_grad(x.size());
  bool certified = false;
  if (!psi.is_differentiable() && psi.has_closed_form()) {
    ExactSolution s = solve_exact(query, psi);
    if (std::equal(s.x.begin(), s.x.end(), x.begin(), x.end())) {
      psi_grad = std::move(s.g);
      certified = true;
    }
  }
  if (!certified) psi.subgradient(x, psi_grad);
  return OmegaEval{omega_value(query, psi, x), omega_gradient(query, psi_grad, x)};
}

}  // namespace spgm
