#pragma once

// Proximal step for the model
//
//   Omega(x) = <m, x> + psi(x) + (M/2) ||x - center||^2
//
// solved either in closed form (prox_exact) or by inner SGD on Omega
// (prox_inexact_sgd).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "spgm/point.hpp"
#include "spgm/random.hpp"

namespace spgm {

struct ZeroPsi {};

// psi(x) = (a/2) ||x||^2
struct QuadraticPsi {
  double a = 0.0;
};

// psi(x) = lambda ||x||_1
struct L1Psi {
  double lambda = 0.0;
};

// psi(x) = lambda * sum_g ||x_g||_inf over contiguous groups.
struct GroupLinf1Psi {
  double lambda = 0.0;
  std::vector<std::size_t> group_sizes;
};

// Indicator of {lo <= x <= hi}.
struct BoxPsi {
  Point lo;
  Point hi;
};

// User-supplied convex, L_psi-smooth psi. Only the inexact solver handles it.
struct SmoothPsi {
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  double L_psi = 0.0;
};

class ProxPart {
 public:
  using Kind =
      std::variant<ZeroPsi, QuadraticPsi, L1Psi, GroupLinf1Psi, BoxPsi, SmoothPsi>;

  ProxPart() = default;

  static ProxPart zero();
  static ProxPart quadratic(double a);
  static ProxPart l1(double lambda);
  static ProxPart group_linf1(double lambda, std::vector<std::size_t> group_sizes);
  static ProxPart box(Point lo, Point hi);
  static ProxPart smooth(SmoothPsi oracle);

  // Copy whose stochastic gradient oracle adds isotropic Gaussian noise with
  // total variance sigma2 (E||zeta||^2 = sigma2). Used by the inexact path.
  ProxPart with_gradient_noise(double sigma2) const;

  const Kind& kind() const { return kind_; }
  std::string_view name() const;

  bool has_closed_form() const;
  bool is_differentiable() const;
  // L_psi of the gradient; throws for non-differentiable kinds.
  double smoothness() const;
  double gradient_noise() const { return gradient_noise_; }

  // Throws InvalidInput when the kind's layout does not match dimension d.
  void check_dimension(std::size_t d) const;

  // +infinity outside the box for the indicator kind.
  double value(std::span<const double> x) const;
  // Differentiable kinds only.
  void gradient(std::span<const double> x, std::span<double> out) const;
  // Some element of the subdifferential (the gradient when differentiable).
  // Outside the box domain the psi part is reported as zero.
  void subgradient(std::span<const double> x, std::span<double> out) const;
  // gradient(x) plus N(0, (sigma_psi^2 / d) I).
  void stochastic_gradient(std::span<const double> x, RandomStream& rng,
                           std::span<double> out) const;

 private:
  explicit ProxPart(Kind kind) : kind_(std::move(kind)) {}

  Kind kind_{ZeroPsi{}};
  double gradient_noise_ = 0.0;
};

struct ProxQuery {
  Point m;       // linearization vector (g_k or m_k)
  Point center;  // x_k
  double M = 1.0;

  // M > 0, matching dimensions, finite entries.
  void validate() const;
};

struct ProxResult {
  Point x_plus;
  // psi-subgradient at x_plus used for stationarity. For the closed-form
  // non-differentiable kinds this is the one satisfying
  //   m + g + M (x_plus - center) = 0.
  Point psi_subgradient;
  double omega_decrease = 0.0;   // Omega(center) - Omega(x_plus)
  double stationarity_sq = 0.0;  // ||grad Omega(x_plus)||^2
  std::size_t inner_iterations = 0;
  std::size_t inner_oracle_calls = 0;
  bool criterion_verified = true;
};

struct OmegaEval {
  double value = 0.0;
  Point grad;
};

double omega_value(const ProxQuery& query, const ProxPart& psi,
                   std::span<const double> x);

// grad uses the certifying subgradient when x is the exact prox output of the
// query, and ProxPart::subgradient elsewhere.
OmegaEval omega_eval(const ProxQuery& query, const ProxPart& psi,
                     std::span<const double> x);

ProxResult prox_exact(const ProxQuery& query, const ProxPart& psi);

// Euclidean projection onto {x : ||x||_1 <= radius}; sort-based, O(n log n).
Point project_l1_ball(std::span<const double> y, double radius);

struct InexactProxOptions {
  double target_S = 1.0;
  // Defaults to 1 / (L_psi + M).
  std::optional<double> inner_step;
  // Defaults to inexact_default_iterations(...).
  std::optional<std::size_t> max_iters;
  // When false the solver always spends the whole iteration budget.
  bool stop_on_criterion = true;
};

// Reference iteration count
//   kappa ln(kappa) + kappa sigma_psi^2 / S,  kappa = (L_psi + M) / M
// with unit constant.
double inexact_reference_budget(double M, double L_psi, double sigma2_psi,
                                double target_S);

// Burn-in ceil(kappa ln(4 kappa)) plus averaging window
// ceil(2 kappa sigma_psi^2 / S).
std::size_t inexact_default_iterations(double M, double L_psi, double sigma2_psi,
                                       double target_S);

// Fixed-step SGD on Omega with suffix averaging. Checks the surrogate
//   ||grad Omega(x)||^2 <= (M^2/16) ||x - center||^2 + target_S
// at the center and at the returned point; when the final check fails the
// result is flagged criterion_verified = false. Never returns a point with
// Omega above Omega(center).
ProxResult prox_inexact_sgd(const ProxQuery& query, const ProxPart& psi,
                            const InexactProxOptions& options, RandomStream& rng);

}  // namespace spgm
