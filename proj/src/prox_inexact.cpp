#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spgm/kernels.hpp"
#include "spgm/prox.hpp"

namespace spgm {

namespace {

double condition(double M, double L_psi) { return (L_psi + M) / M; }

void check_budget_inputs(double M, double L_psi, double sigma2_psi, double target_S) {
  if (!(M > 0.0) || !std::isfinite(M)) throw InvalidParameter("M must be finite and > 0");
  if (!(L_psi >= 0.0)) throw InvalidParameter("L_psi must be >= 0");
  if (!(sigma2_psi >= 0.0)) throw InvalidParameter("sigma_psi^2 must be >= 0");
  if (!(target_S > 0.0)) throw InvalidParameter("target_S must be > 0");
}

// Draws of the inner stochastic gradient grad Omega(x) + zeta.
class InnerOracle {
 public:
  InnerOracle(const ProxQuery& q, const ProxPart& psi, RandomStream& rng)
      : q_(q), psi_(psi), rng_(rng), buf_(q.center.size()) {}

  void sample(std::span<const double> x, std::span<double> out) {
    psi_.stochastic_gradient(x, rng_, buf_);
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[i] = q_.m[i] + buf_[i] + q_.M * (x[i] - q_.center[i]);
    }
    ++calls_;
  }

  std::size_t calls() const { return calls_; }

 private:
  const ProxQuery& q_;
  const ProxPart& psi_;
  RandomStream& rng_;
  Point buf_;
  std::size_t calls_ = 0;
};

// Surrogate of the inexactness criterion from n fresh draws at x. The squared
// norm of the draw average is debiased by sigma_psi^2 / n.
bool surrogate_holds(InnerOracle& oracle, const ProxQuery& q, double sigma2_psi,
                     double target_S, std::span<const double> x) {
  if (std::isinf(target_S)) return true;
  const auto n = static_cast<std::size_t>(
      std::max(1.0, std::ceil(4.0 * sigma2_psi / target_S)));
  Point mean(x.size(), 0.0);
  Point draw(x.size());
  for (std::size_t j = 0; j < n; ++j) {
    oracle.sample(x, draw);
    for (std::size_t i = 0; i < x.size(); ++i) mean[i] += draw[i];
  }
  for (double& v : mean) v /= static_cast<double>(n);
  const double grad_sq = kernels::squared_norm(mean) - sigma2_psi / static_cast<double>(n);
  const double rhs =
      q.M * q.M / 16.0 * kernels::squared_distance(x, q.center) + target_S;
  return grad_sq <= rhs;
}

}  // namespace

double inexact_reference_budget(double M, double L_psi, double sigma2_psi,
                                double target_S) {
  check_budget_inputs(M, L_psi, sigma2_psi, target_S);
  const double kappa = condition(M, L_psi);
  return kappa * std::log(kappa) + kappa * sigma2_psi / target_S;
}

std::size_t inexact_default_iterations(double M, double L_psi, double sigma2_psi,
                                       double target_S) {
  check_budget_inputs(M, L_psi, sigma2_psi, target_S);
  const double kappa = condition(M, L_psi);
  const double burn_in = std::ceil(kappa * std::log(4.0 * kappa));
  const double window =
      std::isinf(target_S) ? 0.0 : std::ceil(2.0 * kappa * sigma2_psi / target_S);
  return static_cast<std::size_t>(burn_in + window);
}

ProxResult prox_inexact_sgd(const ProxQuery& query, const ProxPart& psi,
                            const InexactProxOptions& options, RandomStream& rng) {
  query.validate();
  psi.check_dimension(query.center.size());
  if (!psi.is_differentiable()) {
    throw UnsupportedProx("inner SGD needs a differentiable psi, got '" +
                          std::string(psi.name()) + "'");
  }
  const double L_psi = psi.smoothness();
  const double sigma2 = psi.gradient_noise();
  const double S = options.target_S;
  check_budget_inputs(query.M, L_psi, sigma2, S);

  const double step = options.inner_step.value_or(1.0 / (L_psi + query.M));
  if (!(step > 0.0)) throw InvalidParameter("inner step must be > 0");
  const std::size_t iters = options.max_iters.value_or(
      inexact_default_iterations(query.M, L_psi, sigma2, S));
  const double kappa = condition(query.M, L_psi);
  const auto burn_in = static_cast<std::size_t>(std::ceil(kappa * std::log(4.0 * kappa)));

  const std::size_t d = query.center.size();
  InnerOracle oracle(query, psi, rng);
  ProxResult result;

  auto finish = [&](Point x, std::size_t inner_iterations, bool verified) {
    Point psi_grad(d);
    psi.gradient(x, psi_grad);
    double stationarity = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double gi = query.m[i] + psi_grad[i] + query.M * (x[i] - query.center[i]);
      stationarity += gi * gi;
    }
    result.stationarity_sq = stationarity;
    result.omega_decrease = std::max(
        0.0, omega_value(query, psi, query.center) - omega_value(query, psi, x));
    result.x_plus = std::move(x);
    result.psi_subgradient = std::move(psi_grad);
    result.inner_iterations = inner_iterations;
    result.inner_oracle_calls = oracle.calls();
    result.criterion_verified = verified;
    return result;
  };

  if (options.stop_on_criterion &&
      surrogate_holds(oracle, query, sigma2, S, query.center)) {
    return finish(query.center, 0, true);
  }

  Point x = query.center;
  Point g(d);
  Point average(d, 0.0);
  // Suffix averaging over the iterates after burn-in; with a budget shorter
  // than the burn-in only the last iterate is kept.
  const std::size_t average_from = iters > burn_in ? burn_in : (iters == 0 ? 0 : iters - 1);
  std::size_t averaged = 0;
  for (std::size_t t = 0; t < iters; ++t) {
    oracle.sample(x, g);
    kernels::axpby(1.0, x, -step, g, x);
    if (!all_finite(x)) {
      throw InvalidParameter("inner SGD diverged; reduce the inner step");
    }
    if (t >= average_from) {
      ++averaged;
      const double w = 1.0 / static_cast<double>(averaged);
      kernels::axpby(1.0 - w, average, w, x, average);
    }
  }
  Point candidate = averaged > 0 ? average : x;

  // Never hand back a point that increases the model.
  if (omega_value(query, psi, candidate) > omega_value(query, psi, query.center)) {
    candidate = query.center;
  }
  const bool verified = surrogate_holds(oracle, query, sigma2, S, candidate);
  return finish(std::move(candidate), iters, verified);
}

}  // namespace spgm
