#pragma once

// Composite objective F = f + psi, Gaussian gradient noise and oracle
// accounting.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "spgm/point.hpp"
#include "spgm/prox.hpp"
#include "spgm/random.hpp"

namespace spgm {

enum class NoiseConvention {
  // E||xi||^2 = sigma2, i.e. (sigma2 / d) I per coordinate. Default.
  kTotalVariance,
  // sigma2 I per coordinate, so E||xi||^2 = d * sigma2.
  kPerCoordinate,
};

struct NoiseModel {
  double sigma2 = 0.0;
  NoiseConvention convention = NoiseConvention::kTotalVariance;

  double per_coordinate_variance(std::size_t d) const;
  // E||xi||^2 of a single draw.
  double total_variance(std::size_t d) const;
};

class OracleCounter {
 public:
  void add(std::size_t n) { calls_ += n; }
  std::size_t calls() const { return calls_; }

 private:
  std::size_t calls_ = 0;
};

struct SmoothPart {
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  double L = 1.0;
  // Optimal value of F = f + psi when known.
  std::optional<double> F_star;
};

// Immutable after construction; share freely between runs.
struct CompositeProblem {
  std::size_t d = 0;
  SmoothPart smooth;
  ProxPart psi;
  NoiseModel noise;

  // Throws InvalidInput on a malformed definition.
  void validate() const;

  double f(std::span<const double> x) const { return smooth.value(x); }
  Point grad_f(std::span<const double> x) const;
  double F(std::span<const double> x) const { return f(x) + psi.value(x); }
  // ||grad f(x) + s||^2 with s = ProxPart::subgradient(x).
  double grad_F_norm_sq(std::span<const double> x) const;
  double noise_variance() const { return noise.total_variance(d); }
};

// grad f(x) plus the mean of `batch` i.i.d. noise draws. Adds `batch` to the
// counter.
Point stochastic_grad(const CompositeProblem& problem, std::span<const double> x,
                      std::size_t batch, RandomStream& rng, OracleCounter& counter);

// f = (L/2)||x||^2, psi = (a/2)||x||^2, F* = 0.
CompositeProblem build_quadratic_instance(
    double L, double a, double sigma2, std::size_t d,
    NoiseConvention convention = NoiseConvention::kTotalVariance);

}  // namespace spgm
