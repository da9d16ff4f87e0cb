#pragma once

// Vanilla stochastic proximal gradient and the Polyak-momentum variant.
//
// Indexing: step k draws g_k at x_k, forms
//   m_k = (1 - gamma_{k-1}) m_{k-1} + gamma_{k-1} g_k
// and sets x_{k+1} = prox(m_k, x_k, M_k). Step 0 builds m_{-1} from the
// initialization strategy.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spgm/core.hpp"
#include "spgm/prox.hpp"
#include "spgm/schedule.hpp"

namespace spgm {

enum class InitKind {
  kNonCompositeZero,  // m_{-1} = -gamma/(1-gamma) g_0, so m_0 = 0
  kCompositeG0,       // m_0 = g_0
  kMiniBatch,         // m_0 = g_0 averaged over b_0 samples
};

struct InitStrategy {
  InitKind kind = InitKind::kCompositeG0;
  // gamma_{-1}; defaults to the schedule's gamma_0.
  std::optional<double> gamma_minus1;
  // Mini-batch size b_0; defaults to minibatch_size(...).
  std::optional<std::size_t> b0;
};

// ceil(sigma2 / (L F0)), at least 1. Throws InvalidParameter unless F0 > 0.
std::size_t minibatch_size(double sigma2, double L, double F0);

// E||m_0 - grad f(x_0)||^2 for the strategy, with `batch` the per-step batch.
double initial_tracking_error(const CompositeProblem& problem, std::span<const double> x0,
                              const InitStrategy& init, std::size_t batch);

// Phi_0 = F(x_0) - F* + a E||m_0 - grad f(x_0)||^2. Needs F*.
double initial_potential(const CompositeProblem& problem, std::span<const double> x0,
                         const InitStrategy& init, double a, std::size_t batch);

// (1 - gamma) m_prev + gamma g; gamma must lie in (0, 1].
Point momentum_update(std::span<const double> m_prev, std::span<const double> g,
                      double gamma);

// m_{-1} for the strategy given the first gradient draw.
Point initial_momentum(InitKind kind, std::span<const double> g0, double gamma_minus1);

struct InexactConfig {
  InexactProxOptions options;
  RandomStream* rng = nullptr;
};

struct StepOutput {
  Point x_next;
  Point g;  // stochastic gradient drawn at x_k
  Point m;  // linearization used by the prox step (g for vanilla, m_k otherwise)
  ProxResult prox;
};

// Solves the prox step with the closed form when available and inner SGD
// otherwise (or whenever `inexact` is given).
ProxResult solve_prox(const ProxQuery& query, const ProxPart& psi,
                      const InexactConfig* inexact);

StepOutput vanilla_step(const CompositeProblem& problem, std::span<const double> x,
                        double M, std::size_t batch, RandomStream& rng,
                        OracleCounter& counter, const InexactConfig* inexact = nullptr);

// State entering step k: x_k, m_{k-1} and k.
struct MomentumState {
  Point x;
  Point m;
  std::size_t k = 0;
};

// Applies momentum_update with gamma (= gamma_{k-1}) to a fresh draw, then the
// prox step with M (= M_k). Returns the state entering step k+1.
StepOutput momentum_step(const CompositeProblem& problem, MomentumState& state, double M,
                         double gamma, std::size_t batch, RandomStream& rng,
                         OracleCounter& counter, const InexactConfig* inexact = nullptr);

struct IterateRecord {
  std::size_t k = 0;
  double F_gap = 0.0;
  double grad_norm_sq = 0.0;
  double delta = 0.0;  // ||m_k - grad f(x_k)||^2; ||g_k - grad f(x_k)||^2 for vanilla
  double R = 0.0;      // ||x_{k+1} - x_k||^2, zero on the terminal row
  double phi = 0.0;    // F_gap + a * delta
  double M = 0.0;
  double gamma = 0.0;
  std::size_t oracle_calls = 0;
};

enum class Method { kVanilla, kMomentum };

enum class SamplerWeighting {
  kAuto,     // uniform for constant schedules, 1/M_k for time-varying ones
  kUniform,
  kInverseM,
};

struct RunOptions {
  Method method = Method::kMomentum;
  std::size_t K = 0;
  std::size_t batch = 1;
  Point x0;
  InitStrategy init;
  // Steps stop before oracle_calls would exceed this.
  std::optional<std::size_t> budget;
  SamplerWeighting weighting = SamplerWeighting::kAuto;
  // Lyapunov weight for phi; defaults to the schedule's a.
  std::optional<double> lyapunov_a;
  std::optional<InexactProxOptions> inexact;
  bool keep_records = true;
};

struct SampledOutput {
  std::size_t index = 0;  // t in {1, ..., K}
  Point x;
};

struct RunResult {
  // Rows k = 0..K_done; empty when no step ran.
  std::vector<IterateRecord> records;
  std::size_t steps = 0;
  std::optional<SampledOutput> output;
  // Record of the sampled iterate (kept even with keep_records = false).
  std::optional<IterateRecord> output_record;
  Point x_final;
  std::size_t oracle_calls = 0;
  // Steps whose M_k did not exceed the schedule floor.
  std::size_t floor_violations = 0;
  // F* unknown: F_gap is measured against the best F seen in the run.
  bool f_gap_relative = false;
  // Inner solves that ended without passing the surrogate check.
  std::size_t unverified_prox_steps = 0;
};

// Streams: gradient noise, output sampler, inner prox and diagnostics are
// independent sub-streams of `seed`.
RunResult run(const CompositeProblem& problem, const Schedule& schedule,
              const RunOptions& options, std::uint64_t seed);

}  // namespace spgm
