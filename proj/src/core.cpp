#include "spgm/core.hpp"

#include <cmath>
#include <string>

#include "spgm/kernels.hpp"

namespace spgm {

double NoiseModel::per_coordinate_variance(std::size_t d) const {
  return convention == NoiseConvention::kTotalVariance
             ? sigma2 / static_cast<double>(d)
             : sigma2;
}

double NoiseModel::total_variance(std::size_t d) const {
  return convention == NoiseConvention::kTotalVariance
             ? sigma2
             : sigma2 * static_cast<double>(d);
}

void CompositeProblem::validate() const {
  if (d == 0) throw InvalidInput("problem dimension must be >= 1");
  if (!smooth.value || !smooth.gradient) {
    throw InvalidInput("smooth part needs value and gradient oracles");
  }
  if (!(smooth.L > 0.0) || !std::isfinite(smooth.L)) {
    throw InvalidInput("smoothness constant L must be finite and > 0");
  }
  if (!(noise.sigma2 >= 0.0) || !std::isfinite(noise.sigma2)) {
    throw InvalidInput("noise variance must be finite and >= 0");
  }
  psi.check_dimension(d);
}

Point CompositeProblem::grad_f(std::span<const double> x) const {
  Point g(d);
  smooth.gradient(x, g);
  return g;
}

double CompositeProblem::grad_F_norm_sq(std::span<const double> x) const {
  Point g = grad_f(x);
  Point s(d);
  psi.subgradient(x, s);
  kernels::axpby(1.0, g, 1.0, s, g);
  return kernels::squared_norm(g);
}

Point stochastic_grad(const CompositeProblem& problem, std::span<const double> x,
                      std::size_t batch, RandomStream& rng, OracleCounter& counter) {
  if (batch == 0) throw InvalidParameter("batch size must be >= 1");
  require_dimension(x, problem.d, "gradient query point");
  require_finite(x, "gradient query point");

  Point g = problem.grad_f(x);
  const double sd = std::sqrt(problem.noise.per_coordinate_variance(problem.d));
  if (sd > 0.0) {
    Point noise(problem.d, 0.0);
    for (std::size_t j = 0; j < batch; ++j) {
      for (double& v : noise) v += rng.normal();
    }
    const double scale = sd / static_cast<double>(batch);
    for (std::size_t i = 0; i < problem.d; ++i) g[i] += scale * noise[i];
  }
  counter.add(batch);
  return g;
}

CompositeProblem build_quadratic_instance(double L, double a, double sigma2,
                                          std::size_t d,
                                          NoiseConvention convention) {
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidInput("L must be finite and > 0");
  CompositeProblem p;
  p.d = d;
  p.smooth.value = [L](std::span<const double> x) {
    return 0.5 * L * kernels::squared_norm(x);
  };
  p.smooth.gradient = [L](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = L * x[i];
  };
  p.smooth.L = L;
  p.smooth.F_star = 0.0;
  p.psi = ProxPart::quadratic(a);
  p.noise = NoiseModel{sigma2, convention};
  p.validate();
  return p;
}

}  // namespace spgm
