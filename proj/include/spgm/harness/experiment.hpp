#pragma once

// Multi-seed runs, per-seed CSV traces and the seed-aggregated summary.
//
// Trace CSV columns:
//   k,oracle_calls,F_gap,grad_norm_sq,delta,R,phi,M_k,gamma_k,grad_norm_sq_smoothed
// Summary CSV columns:
//   k,oracle_calls,grad_norm_sq_mean,grad_norm_sq_stderr,grad_norm_sq_smoothed,
//   F_gap_mean,F_gap_stderr,delta_mean,delta_stderr,phi_mean,phi_stderr

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spgm/harness/config.hpp"
#include "spgm/optim.hpp"

namespace spgm::harness {

// Runs fn(0..n-1) on a small thread pool. Results must be written to
// per-index slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

std::vector<RunResult> run_seeds(const PreparedRun& prepared,
                                 const std::vector<std::uint64_t>& seeds);

// Trailing moving average; entry k averages the last min(window, k+1) values.
std::vector<double> moving_average(const std::vector<double>& values, std::size_t window);

struct FieldStats {
  std::vector<double> mean;
  std::vector<double> stderr_;
};

struct SeedAggregate {
  std::vector<std::size_t> k;
  std::vector<std::size_t> oracle_calls;
  FieldStats grad_norm_sq;
  FieldStats F_gap;
  FieldStats delta;
  FieldStats phi;
};

// Over the common prefix of the runs' records.
SeedAggregate aggregate(const std::vector<RunResult>& runs);

// First k >= 1 with curve[k] <= tolerance.
std::optional<std::size_t> first_reach(const std::vector<double>& curve, double tolerance);

std::string trace_csv(const std::vector<IterateRecord>& records, std::size_t window);
std::string summary_csv(const SeedAggregate& agg, std::size_t window);

struct ExperimentResult {
  PreparedRun prepared;
  std::vector<RunResult> runs;
  SeedAggregate aggregate;
  bool reached = false;
  std::optional<std::size_t> first_k;
  std::vector<std::filesystem::path> files;
  std::string summary_json;
};

// Writes trace_seed<N>.csv, summary.csv and summary.json to out_dir when it
// is given. Throws InvalidInput when the directory cannot be written.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::optional<std::filesystem::path>& out_dir);

}  // namespace spgm::harness
