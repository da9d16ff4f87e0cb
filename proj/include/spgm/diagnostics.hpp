#pragma once

// Monte Carlo checks of the descent inequalities, closed-form oracles for the
// quadratic lower-bound instance, and decay-rate probes.
//
// Expectation checks compare seed (or replication) means of RHS - LHS with
// three standard errors of slack.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "spgm/core.hpp"
#include "spgm/optim.hpp"
#include "spgm/prox.hpp"

namespace spgm {

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Sample mean and standard error of the mean (n - 1 denominator).
MeanStderr mean_stderr(std::span<const double> values);

struct CheckReport {
  std::string name;
  double lhs = 0.0;     // mean of the left side at the worst point
  double rhs = 0.0;     // mean of the right side at the worst point
  double margin = 0.0;  // mean of rhs - lhs at the worst point
  double stderr_ = 0.0;
  std::size_t worst_k = 0;
  std::size_t points = 0;  // number of k (or 1) that were checked
  bool pass = false;
};

// Replays step k from (x_k, m_{k-1}) with n_mc independent noise draws and
// checks
//   E Delta_{k+1} <= (1 - gamma_k) E Delta_k + (L^2/gamma_k) E R_k + gamma_k^2 sigma^2 / batch.
struct DescentDeltaInput {
  Point x;            // x_k
  Point m_prev;       // m_{k-1}
  double M = 1.0;     // M_k
  double gamma_prev = 1.0;  // gamma_{k-1}
  double gamma = 1.0;       // gamma_k
  std::size_t batch = 1;
};

inline constexpr std::size_t kMinMonteCarloDraws = 100;

// Throws InsufficientSamples when n_mc < kMinMonteCarloDraws.
CheckReport check_descent_delta(const CompositeProblem& problem,
                                const DescentDeltaInput& input, std::size_t n_mc,
                                RandomStream& rng);

// Trajectories from independent seeds of one configuration.
using SeedRecords = std::vector<std::vector<IterateRecord>>;

// 3 (M_k^2 + L^2) R_k + 3 Delta_k >= ||grad F(x_{k+1})||^2 on seed means, every k.
CheckReport check_gradient_bound(const SeedRecords& runs, double L);

enum class LyapunovForm {
  // Phi_{k+1} <= Phi_k - ||grad F(x_{k+1})||^2 / (48 M_k) + 27 L sigma^2 / (4 M_k^2)
  kBasic,
  // Refined, with the stated coefficient: extra -(3 sqrt2 / (2 M_k)) Delta_k and noise term
  // 27 sqrt2 L sigma^2 / (4 M_k^2). Informative only; does not hold in general.
  kRefinedAsStated,
  // Refined with the coefficient the derivation produces: a gamma_k / 2 =
  // 3 / (8 (M_k - L)) on Delta_k.
  kRefinedDerived,
};

inline constexpr std::size_t kMinLyapunovSeeds = 50;

// Records must carry phi computed with the a that matches the form. Throws
// InsufficientSamples with fewer than min_seeds runs.
CheckReport check_lyapunov_descent(const SeedRecords& runs, LyapunovForm form, double L,
                                   double sigma2, std::size_t min_seeds = kMinLyapunovSeeds);

// lim E||grad F(x_k)||^2 of the vanilla recursion on the quadratic instance:
// (L+a)^2 beta^2 sigma^2 / (1 - c^2), c = (M-L)/(M+a), beta = 1/(M+a). The
// per-coordinate convention multiplies by d. Throws InvalidParameter when
// |c| >= 1.
double stationary_error_oracle(double L, double a, double M, double sigma2, std::size_t d,
                               NoiseConvention convention = NoiseConvention::kTotalVariance);

// M (center - x_plus) for the exact prox of the query.
Point grad_mapping(const ProxQuery& query, const ProxPart& psi);

// Per-K samples of a statistic at the sampled output.
struct DecaySample {
  double K = 0.0;
  std::vector<double> values;
};

struct DecayReport {
  std::string name;
  std::vector<double> K;
  std::vector<double> mean;
  std::vector<double> stderr_;
  double slope = 0.0;  // OLS slope of log(mean) on log(K)
  double slope_lo = 0.0;
  double slope_hi = 0.0;
  bool pass = false;
};

// OLS slope of log(y) against log(x); needs >= 2 points with positive values.
double loglog_slope(std::span<const double> x, std::span<const double> y);

// Passes when slope_lo <= slope <= slope_hi.
DecayReport decay_probe(std::string name, const std::vector<DecaySample>& samples,
                        double slope_lo, double slope_hi);

// E||m_t - grad f(x_t)||^2 decay; passes at slope <= -0.35.
DecayReport variance_reduction_probe(const std::vector<DecaySample>& samples);

// E||grad F(x_t)||^2 decay; passes for slope in [-0.65, -0.35].
DecayReport rate_envelope_probe(const std::vector<DecaySample>& samples);

// Monte Carlo over n_rep independent solves of
//   E||grad Omega(x_plus)||^2 <= (M^2/16) E||x_plus - center||^2 + S.
// Also fails when any solve spends more than budget_factor times the
// reference budget.
struct InexactCriterionReport {
  CheckReport check;
  double mean_iterations = 0.0;
  std::size_t max_iterations = 0;
  double reference_budget = 0.0;
  double budget_factor = 4.0;
  std::size_t unverified = 0;
};

InexactCriterionReport check_inexact_criterion(const ProxQuery& query, const ProxPart& psi,
                                               const InexactProxOptions& options,
                                               std::size_t n_rep, std::uint64_t seed,
                                               double budget_factor = 4.0);

}  // namespace spgm
