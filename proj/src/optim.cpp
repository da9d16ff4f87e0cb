#include "spgm/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spgm/kernels.hpp"
#include "spgm/sampling.hpp"

namespace spgm {

std::size_t minibatch_size(double sigma2, double L, double F0) {
  if (!(F0 > 0.0) || !std::isfinite(F0)) {
    throw InvalidParameter("mini-batch init needs F(x0) - F* > 0");
  }
  if (!(L > 0.0)) throw InvalidParameter("L must be > 0");
  if (!(sigma2 >= 0.0)) throw InvalidParameter("sigma2 must be >= 0");
  const double b = std::ceil(sigma2 / (L * F0));
  if (b > 1e12) throw InvalidParameter("mini-batch size overflows");
  return std::max<std::size_t>(1, static_cast<std::size_t>(b));
}

namespace {

double known_gap(const CompositeProblem& problem, std::span<const double> x0) {
  if (!problem.smooth.F_star) {
    throw InvalidParameter("initial potential needs a known F*");
  }
  return problem.F(x0) - *problem.smooth.F_star;
}

std::size_t resolved_b0(const CompositeProblem& problem, std::span<const double> x0,
                        const InitStrategy& init) {
  if (init.b0) {
    if (*init.b0 == 0) throw InvalidParameter("b0 must be >= 1");
    return *init.b0;
  }
  return minibatch_size(problem.noise_variance(), problem.smooth.L, known_gap(problem, x0));
}

}  // namespace

double initial_tracking_error(const CompositeProblem& problem, std::span<const double> x0,
                              const InitStrategy& init, std::size_t batch) {
  if (batch == 0) throw InvalidParameter("batch size must be >= 1");
  switch (init.kind) {
    case InitKind::kNonCompositeZero:
      return kernels::squared_norm(problem.grad_f(x0));
    case InitKind::kCompositeG0:
      return problem.noise_variance() / static_cast<double>(batch);
    case InitKind::kMiniBatch:
      return problem.noise_variance() / static_cast<double>(resolved_b0(problem, x0, init));
  }
  return 0.0;
}

double initial_potential(const CompositeProblem& problem, std::span<const double> x0,
                         const InitStrategy& init, double a, std::size_t batch) {
  return known_gap(problem, x0) + a * initial_tracking_error(problem, x0, init, batch);
}

Point momentum_update(std::span<const double> m_prev, std::span<const double> g,
                      double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw InvalidParameter("momentum weight gamma must lie in (0, 1], got " +
                           std::to_string(gamma));
  }
  require_dimension(m_prev, g.size(), "previous momentum");
  Point out(g.size());
  kernels::axpby(1.0 - gamma, m_prev, gamma, g, out);
  return out;
}

Point initial_momentum(InitKind kind, std::span<const double> g0, double gamma_minus1) {
  if (kind == InitKind::kNonCompositeZero) {
    // With gamma = 1 the update discards m_{-1} entirely.
    if (gamma_minus1 >= 1.0) return Point(g0.size(), 0.0);
    Point m(g0.size());
    const double scale = -gamma_minus1 / (1.0 - gamma_minus1);
    for (std::size_t i = 0; i < g0.size(); ++i) m[i] = scale * g0[i];
    return m;
  }
  return Point(g0.begin(), g0.end());
}

ProxResult solve_prox(const ProxQuery& query, const ProxPart& psi,
                      const InexactConfig* inexact) {
  if (inexact != nullptr) {
    if (inexact->rng == nullptr) throw InvalidParameter("inexact prox needs a random stream");
    return prox_inexact_sgd(query, psi, inexact->options, *inexact->rng);
  }
  return prox_exact(query, psi);
}

StepOutput vanilla_step(const CompositeProblem& problem, std::span<const double> x,
                        double M, std::size_t batch, RandomStream& rng,
                        OracleCounter& counter, const InexactConfig* inexact) {
  StepOutput out;
  out.g = stochastic_grad(problem, x, batch, rng, counter);
  out.m = out.g;
  ProxQuery query{out.g, Point(x.begin(), x.end()), M};
  out.prox = solve_prox(query, problem.psi, inexact);
  out.x_next = out.prox.x_plus;
  return out;
}

namespace {

StepOutput advance(const CompositeProblem& problem, MomentumState& state, Point g,
                   double M, double gamma, const InexactConfig* inexact) {
  StepOutput out;
  out.m = momentum_update(state.m, g, gamma);
  out.g = std::move(g);
  ProxQuery query{out.m, state.x, M};
  out.prox = solve_prox(query, problem.psi, inexact);
  out.x_next = out.prox.x_plus;
  state.x = out.x_next;
  state.m = out.m;
  ++state.k;
  return out;
}

}  // namespace

StepOutput momentum_step(const CompositeProblem& problem, MomentumState& state, double M,
                         double gamma, std::size_t batch, RandomStream& rng,
                         OracleCounter& counter, const InexactConfig* inexact) {
  require_dimension(state.m, problem.d, "momentum");
  Point g = stochastic_grad(problem, state.x, batch, rng, counter);
  return advance(problem, state, std::move(g), M, gamma, inexact);
}

RunResult run(const CompositeProblem& problem, const Schedule& schedule,
              const RunOptions& options, std::uint64_t seed) {
  problem.validate();
  require_dimension(options.x0, problem.d, "initial point");
  require_finite(options.x0, "initial point");
  if (options.batch == 0) throw InvalidParameter("batch size must be >= 1");

  RandomStream noise(seed, StreamId::kGradientNoise);
  RandomStream sampler_rng(seed, StreamId::kOutputSampler);
  RandomStream inner_rng(seed, StreamId::kInnerProx);
  RandomStream diagnostic(seed, StreamId::kDiagnostic);

  const bool momentum = options.method == Method::kMomentum;
  const double a = options.lyapunov_a.value_or(schedule.lyapunov_a());
  const bool inverse_m =
      options.weighting == SamplerWeighting::kInverseM ||
      (options.weighting == SamplerWeighting::kAuto && !schedule.is_constant());

  std::optional<InexactConfig> inexact_cfg;
  if (options.inexact) inexact_cfg = InexactConfig{*options.inexact, &inner_rng};
  const InexactConfig* inexact = inexact_cfg ? &*inexact_cfg : nullptr;

  RunResult result;
  result.f_gap_relative = !problem.smooth.F_star.has_value();
  double best_F = std::numeric_limits<double>::infinity();
  auto gap = [&](std::span<const double> x) {
    const double F = problem.F(x);
    if (problem.smooth.F_star) return std::max(0.0, F - *problem.smooth.F_star);
    best_F = std::min(best_F, F);
    return F - best_F;
  };

  OracleCounter counter;
  WeightedReservoir<SampledOutput> reservoir;
  std::optional<IterateRecord> sampled_row;

  auto emit = [&](IterateRecord row) {
    row.phi = row.F_gap + a * row.delta;
    if (!reservoir.empty() && reservoir.current().index == row.k) sampled_row = row;
    if (options.keep_records) result.records.push_back(row);
  };

  MomentumState state{options.x0, Point(problem.d, 0.0), 0};
  const std::size_t first_batch =
      momentum && options.init.kind == InitKind::kMiniBatch
          ? resolved_b0(problem, options.x0, options.init)
          : options.batch;
  const double gamma_minus1 = options.init.gamma_minus1.value_or(schedule.at(0).gamma);

  for (std::size_t k = 0; k < options.K; ++k) {
    const std::size_t need = k == 0 ? first_batch : options.batch;
    if (options.budget && counter.calls() + need > *options.budget) break;

    const ScheduleParams params = schedule.at(k);
    if (params.M <= schedule.floor()) ++result.floor_violations;
    const Point grad_f = problem.grad_f(state.x);

    IterateRecord row;
    row.k = k;
    row.F_gap = gap(state.x);
    row.grad_norm_sq = problem.grad_F_norm_sq(state.x);
    row.M = params.M;

    StepOutput step;
    if (momentum) {
      Point g = stochastic_grad(problem, state.x, need, noise, counter);
      if (k == 0) state.m = initial_momentum(options.init.kind, g, gamma_minus1);
      const double gamma = k == 0 ? gamma_minus1 : schedule.at(k - 1).gamma;
      const Point x_k = state.x;
      step = advance(problem, state, std::move(g), params.M, gamma, inexact);
      row.delta = kernels::squared_distance(step.m, grad_f);
      row.R = kernels::squared_distance(state.x, x_k);
      row.gamma = params.gamma;
    } else {
      step = vanilla_step(problem, state.x, params.M, options.batch, noise, counter, inexact);
      row.delta = kernels::squared_distance(step.g, grad_f);
      row.R = kernels::squared_distance(step.x_next, state.x);
      row.gamma = 1.0;
      state.x = step.x_next;
      ++state.k;
    }
    if (!step.prox.criterion_verified) ++result.unverified_prox_steps;
    row.oracle_calls = counter.calls();
    emit(row);

    const double h = inverse_m ? 1.0 / params.M : 1.0;
    reservoir.observe(SampledOutput{k + 1, state.x}, h, sampler_rng);
    ++result.steps;
  }

  if (result.steps > 0) {
    // Terminal row for x_K. Its tracking error needs one more gradient draw,
    // taken from the diagnostic stream and not billed to the oracle count.
    const std::size_t n = result.steps;
    OracleCounter unbilled;
    const Point g = stochastic_grad(problem, state.x, options.batch, diagnostic, unbilled);
    const Point grad_f = problem.grad_f(state.x);
    const ScheduleParams params = schedule.at(n);
    IterateRecord row;
    row.k = n;
    row.F_gap = gap(state.x);
    row.grad_norm_sq = problem.grad_F_norm_sq(state.x);
    row.M = params.M;
    if (momentum) {
      const Point m = momentum_update(state.m, g, schedule.at(n - 1).gamma);
      row.delta = kernels::squared_distance(m, grad_f);
      row.gamma = params.gamma;
    } else {
      row.delta = kernels::squared_distance(g, grad_f);
      row.gamma = 1.0;
    }
    row.R = 0.0;
    row.oracle_calls = counter.calls();
    emit(row);

    result.output = reservoir.current();
    if (sampled_row && sampled_row->k == result.output->index) {
      result.output_record = sampled_row;
    }
  }

  result.x_final = state.x;
  result.oracle_calls = counter.calls();
  return result;
}

}  // namespace spgm
