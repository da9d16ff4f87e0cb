#pragma once

// Flat "dotted.key = value" experiment files. '#' starts a comment. Unknown
// keys and malformed values are reported with their line number.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spgm/core.hpp"
#include "spgm/error.hpp"
#include "spgm/optim.hpp"
#include "spgm/schedule.hpp"

namespace spgm::harness {

class ConfigError : public InvalidInput {
 public:
  ConfigError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class GridMetric { kFirstToTolerance, kFinalMeanError };

struct ExperimentConfig {
  // f = (L/2)||x||^2 with psi chosen below; sigma is the noise std.
  double L = 1.0;
  double a = 1e4;
  double sigma = 5.0;
  std::size_t d = 5;
  NoiseConvention noise = NoiseConvention::kTotalVariance;
  double x0 = 1.0;  // every coordinate of the start point

  std::string psi = "quadratic";  // zero | quadratic | l1 | group_linf1 | box
  double psi_lambda = 0.0;
  std::size_t psi_group_size = 1;
  double psi_lo = -1.0;
  double psi_hi = 1.0;

  Method method = Method::kMomentum;
  std::size_t batch = 1;

  ScheduleVariant variant = ScheduleVariant::kManual;
  double M = 100.0;
  double gamma = 0.1;
  InexactConstants inexact_constants = InexactConstants::kProofDerived;
  double eps = kDefaultBoundaryEpsilon;
  std::optional<double> phi0;  // overrides the analytic Phi_0

  InitStrategy init{InitKind::kNonCompositeZero, std::nullopt, std::nullopt};
  SamplerWeighting sampler = SamplerWeighting::kAuto;

  bool inexact = false;
  double target_S = 1.0;
  double sigma2_psi = 0.0;
  std::optional<std::size_t> inner_max_iters;

  std::size_t K = 1000;
  std::optional<std::size_t> budget;
  double tolerance = 0.02;
  std::vector<std::uint64_t> seeds{1};
  std::size_t smoothing_window = 100;
  std::optional<std::filesystem::path> output;

  std::vector<double> grid_M;
  std::vector<double> grid_gamma;
  GridMetric grid_metric = GridMetric::kFirstToTolerance;

  // Cross-field checks; throws ConfigError with line 0.
  void validate() const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// "1,2,5" or "1..20" (inclusive), or a mix: "1..3,10".
std::vector<std::uint64_t> parse_seeds(std::string_view text);
// Comma-separated reals.
std::vector<double> parse_real_list(std::string_view text);

// Problem, schedule and run options described by a config.
struct PreparedRun {
  CompositeProblem problem;
  Schedule schedule;
  RunOptions options;
  double phi0 = 0.0;
};

PreparedRun prepare(const ExperimentConfig& config);

// Output directory: config.output, else $SPGM_OUTPUT_DIR, else ./spgm_out.
std::filesystem::path output_directory(const ExperimentConfig& config);

inline constexpr const char* kOutputDirEnv = "SPGM_OUTPUT_DIR";

}  // namespace spgm::harness
