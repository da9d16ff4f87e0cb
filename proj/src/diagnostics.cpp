#include "spgm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spgm/kernels.hpp"

namespace spgm {

namespace {

// Relative rounding allowance for checks that are exact when sigma2 = 0.
constexpr double kRoundingSlack = 1e-12;

bool within_slack(double margin, double stderr_, double scale) {
  return margin + 3.0 * stderr_ >= -kRoundingSlack * std::max(1.0, scale);
}

struct PairedAccumulator {
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> diff;

  void add(double l, double r) {
    lhs.push_back(l);
    rhs.push_back(r);
    diff.push_back(r - l);
  }
};

double mean_of(std::span<const double> v) { return mean_stderr(v).mean; }

// Fills report from a paired sample if it is worse than what is recorded.
void consider(CheckReport& report, const PairedAccumulator& acc, std::size_t k,
              bool& first) {
  const MeanStderr d = mean_stderr(acc.diff);
  const double l = mean_of(acc.lhs);
  const double r = mean_of(acc.rhs);
  const bool ok = within_slack(d.mean, d.stderr_, std::abs(l) + std::abs(r));
  const double slack = d.mean + 3.0 * d.stderr_;
  const double worst_slack = report.margin + 3.0 * report.stderr_;
  if (first || slack < worst_slack) {
    report.lhs = l;
    report.rhs = r;
    report.margin = d.mean;
    report.stderr_ = d.stderr_;
    report.worst_k = k;
    first = false;
  }
  report.pass = report.pass && ok;
  ++report.points;
}

std::size_t common_length(const SeedRecords& runs) {
  std::size_t n = std::numeric_limits<std::size_t>::max();
  for (const auto& r : runs) n = std::min(n, r.size());
  return runs.empty() ? 0 : n;
}

}  // namespace

MeanStderr mean_stderr(std::span<const double> values) {
  MeanStderr out;
  const std::size_t n = values.size();
  if (n == 0) return out;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  out.mean = mean;
  if (n < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  out.stderr_ = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  return out;
}

CheckReport check_descent_delta(const CompositeProblem& problem,
                                const DescentDeltaInput& input, std::size_t n_mc,
                                RandomStream& rng) {
  if (n_mc < kMinMonteCarloDraws) {
    throw InsufficientSamples("descent check needs at least " +
                              std::to_string(kMinMonteCarloDraws) + " draws, got " +
                              std::to_string(n_mc));
  }
  problem.validate();
  require_dimension(input.x, problem.d, "check point x_k");
  require_dimension(input.m_prev, problem.d, "check momentum m_{k-1}");
  if (!(input.gamma > 0.0 && input.gamma <= 1.0)) {
    throw InvalidParameter("gamma_k must lie in (0, 1]");
  }

  const double L = problem.smooth.L;
  const double sigma2 = problem.noise_variance() / static_cast<double>(input.batch);
  const Point grad_k = problem.grad_f(input.x);
  OracleCounter counter;
  PairedAccumulator acc;
  for (std::size_t r = 0; r < n_mc; ++r) {
    MomentumState state{input.x, input.m_prev, 0};
    const StepOutput step = momentum_step(problem, state, input.M, input.gamma_prev,
                                          input.batch, rng, counter);
    const double delta_k = kernels::squared_distance(step.m, grad_k);
    const double R_k = kernels::squared_distance(step.x_next, input.x);
    const Point g_next = stochastic_grad(problem, step.x_next, input.batch, rng, counter);
    const Point m_next = momentum_update(step.m, g_next, input.gamma);
    const double delta_next = kernels::squared_distance(m_next, problem.grad_f(step.x_next));
    const double rhs = (1.0 - input.gamma) * delta_k + L * L / input.gamma * R_k +
                       input.gamma * input.gamma * sigma2;
    acc.add(delta_next, rhs);
  }
  CheckReport report{"descent_delta", 0, 0, 0, 0, 0, 0, true};
  bool first = true;
  consider(report, acc, 0, first);
  return report;
}

CheckReport check_gradient_bound(const SeedRecords& runs, double L) {
  CheckReport report{"gradient_bound", 0, 0, 0, 0, 0, 0, true};
  const std::size_t n = common_length(runs);
  bool first = true;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    PairedAccumulator acc;
    for (const auto& r : runs) {
      const IterateRecord& row = r[k];
      const double lhs = 3.0 * (row.M * row.M + L * L) * row.R + 3.0 * row.delta;
      // lhs >= ||grad F(x_{k+1})||^2, so the bound side is the first term.
      acc.add(r[k + 1].grad_norm_sq, lhs);
    }
    consider(report, acc, k, first);
  }
  return report;
}

CheckReport check_lyapunov_descent(const SeedRecords& runs, LyapunovForm form, double L,
                                   double sigma2, std::size_t min_seeds) {
  if (runs.size() < min_seeds) {
    throw InsufficientSamples("Lyapunov check needs at least " + std::to_string(min_seeds) +
                              " seeds, got " + std::to_string(runs.size()));
  }
  const char* name = form == LyapunovForm::kBasic              ? "lyapunov_basic"
                     : form == LyapunovForm::kRefinedAsStated ? "lyapunov_refined_as_stated"
                                                              : "lyapunov_refined_derived";
  CheckReport report{name, 0, 0, 0, 0, 0, 0, true};
  const std::size_t n = common_length(runs);
  const double sqrt2 = std::sqrt(2.0);
  bool first = true;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    PairedAccumulator acc;
    for (const auto& r : runs) {
      const IterateRecord& row = r[k];
      const double M = row.M;
      double rhs = row.phi - r[k + 1].grad_norm_sq / (48.0 * M);
      switch (form) {
        case LyapunovForm::kBasic:
          rhs += 27.0 * L * sigma2 / (4.0 * M * M);
          break;
        case LyapunovForm::kRefinedAsStated:
          rhs += -3.0 * sqrt2 / (2.0 * M) * row.delta +
                 27.0 * sqrt2 * L * sigma2 / (4.0 * M * M);
          break;
        case LyapunovForm::kRefinedDerived:
          rhs += -3.0 / (8.0 * (M - L)) * row.delta +
                 27.0 * sqrt2 * L * sigma2 / (4.0 * M * M);
          break;
      }
      acc.add(r[k + 1].phi, rhs);
    }
    consider(report, acc, k, first);
  }
  return report;
}

double stationary_error_oracle(double L, double a, double M, double sigma2, std::size_t d,
                               NoiseConvention convention) {
  if (!(L > 0.0)) throw InvalidParameter("L must be > 0");
  if (!(a >= 0.0)) throw InvalidParameter("a must be >= 0");
  if (!(M > 0.0)) throw InvalidParameter("M must be > 0");
  if (!(sigma2 >= 0.0)) throw InvalidParameter("sigma2 must be >= 0");
  if (d == 0) throw InvalidParameter("d must be >= 1");
  const double c = (M - L) / (M + a);
  if (!(std::abs(c) < 1.0)) {
    throw InvalidParameter("recursion is unstable: |(M-L)/(M+a)| >= 1");
  }
  const double beta = 1.0 / (M + a);
  const double total = convention == NoiseConvention::kTotalVariance
                           ? sigma2
                           : sigma2 * static_cast<double>(d);
  return (L + a) * (L + a) * beta * beta * total / (1.0 - c * c);
}

Point grad_mapping(const ProxQuery& query, const ProxPart& psi) {
  const ProxResult r = prox_exact(query, psi);
  Point out(r.x_plus.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = query.M * (query.center[i] - r.x_plus[i]);
  }
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidInput("log-log slope needs >= 2 paired points");
  }
  double mx = 0.0, my = 0.0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidInput("log-log slope needs positive data");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]) - mx;
    sxy += lx * (std::log(y[i]) - my);
    sxx += lx * lx;
  }
  if (sxx == 0.0) throw InvalidInput("log-log slope needs distinct x values");
  return sxy / sxx;
}

DecayReport decay_probe(std::string name, const std::vector<DecaySample>& samples,
                        double slope_lo, double slope_hi) {
  DecayReport report;
  report.name = std::move(name);
  report.slope_lo = slope_lo;
  report.slope_hi = slope_hi;
  for (const DecaySample& s : samples) {
    const MeanStderr ms = mean_stderr(s.values);
    report.K.push_back(s.K);
    report.mean.push_back(ms.mean);
    report.stderr_.push_back(ms.stderr_);
  }
  report.slope = loglog_slope(report.K, report.mean);
  report.pass = report.slope >= slope_lo && report.slope <= slope_hi;
  return report;
}

DecayReport variance_reduction_probe(const std::vector<DecaySample>& samples) {
  return decay_probe("variance_reduction", samples,
                     -std::numeric_limits<double>::infinity(), -0.35);
}

DecayReport rate_envelope_probe(const std::vector<DecaySample>& samples) {
  return decay_probe("rate_envelope", samples, -0.65, -0.35);
}

InexactCriterionReport check_inexact_criterion(const ProxQuery& query, const ProxPart& psi,
                                               const InexactProxOptions& options,
                                               std::size_t n_rep, std::uint64_t seed,
                                               double budget_factor) {
  if (n_rep < kMinMonteCarloDraws) {
    throw InsufficientSamples("inexact criterion check needs at least " +
                              std::to_string(kMinMonteCarloDraws) + " replications");
  }
  InexactCriterionReport out;
  out.budget_factor = budget_factor;
  out.reference_budget = inexact_reference_budget(query.M, psi.smoothness(),
                                                  psi.gradient_noise(), options.target_S);
  PairedAccumulator acc;
  double iterations = 0.0;
  for (std::size_t r = 0; r < n_rep; ++r) {
    RandomStream rng(seed, StreamId::kInnerProx, r);
    const ProxResult res = prox_inexact_sgd(query, psi, options, rng);
    const double rhs =
        query.M * query.M / 16.0 * kernels::squared_distance(res.x_plus, query.center) +
        options.target_S;
    acc.add(res.stationarity_sq, rhs);
    iterations += static_cast<double>(res.inner_iterations);
    out.max_iterations = std::max(out.max_iterations, res.inner_iterations);
    if (!res.criterion_verified) ++out.unverified;
  }
  out.mean_iterations = iterations / static_cast<double>(n_rep);
  out.check = CheckReport{"inexact_criterion", 0, 0, 0, 0, 0, 0, true};
  bool first = true;
  consider(out.check, acc, 0, first);
  if (static_cast<double>(out.max_iterations) > budget_factor * out.reference_budget) {
    out.check.pass = false;
  }
  return out;
}

}  // namespace spgm
