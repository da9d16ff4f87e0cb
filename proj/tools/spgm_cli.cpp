// spgm: run experiments, grid searches, verification suites and the
// stationary-level oracle.
//
// Exit codes: 0 success (tolerance reached / suite passed), 1 tolerance not
// reached or suite failed, 2 bad input.

#include <fmt/format.h>

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "spgm/diagnostics.hpp"
#include "spgm/harness/config.hpp"
#include "spgm/harness/experiment.hpp"
#include "spgm/harness/grid.hpp"
#include "spgm/harness/verify.hpp"
#include "spgm/kernels.hpp"

namespace {

using namespace spgm;
using namespace spgm::harness;

int cmd_run(const std::string& config_path, const std::string& out) {
  ExperimentConfig config = load_config(config_path);
  if (!out.empty()) config.output = out;
  const auto dir = output_directory(config);
  const ExperimentResult r = run_experiment(config, dir);
  std::cout << r.summary_json;
  std::cerr << fmt::format("wrote {} files to {}\n", r.files.size(), dir.string());
  return r.reached ? 0 : 1;
}

int cmd_grid(const std::string& config_path, const std::vector<double>& Ms,
             const std::vector<double>& gammas, const std::string& metric,
             const std::string& out) {
  ExperimentConfig config = load_config(config_path);
  if (!out.empty()) config.output = out;
  const std::vector<double> M_grid = Ms.empty() ? config.grid_M : Ms;
  const std::vector<double> gamma_grid = gammas.empty() ? config.grid_gamma : gammas;
  GridMetric m = config.grid_metric;
  if (metric == "first_to_tolerance") m = GridMetric::kFirstToTolerance;
  else if (metric == "final_mean_error") m = GridMetric::kFinalMeanError;
  else if (!metric.empty()) throw InvalidInput("unknown metric '" + metric + "'");

  const GridResult g = grid_search(config, M_grid, gamma_grid, m);
  std::cout << grid_table(g);
  const auto dir = output_directory(config);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "grid.csv", std::ios::binary) << grid_csv(g);
  std::cerr << fmt::format("wrote {}\n", (dir / "grid.csv").string());
  return g.best_cell().first_k ? 0 : 1;
}

int cmd_verify(const std::string& suite, const std::string& out) {
  const SuiteReport r = verify_suite(suite);
  const std::string text = r.to_json().dump(2) + "\n";
  std::cout << text;
  if (!out.empty()) std::ofstream(out, std::ios::binary) << text;
  return r.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic proximal gradient with Polyak momentum"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment config over its seeds");
  run_cmd->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "Output directory (overrides config and SPGM_OUTPUT_DIR)");

  std::vector<double> Ms, gammas;
  std::string metric;
  auto* grid_cmd = app.add_subcommand("grid", "Grid search over manual (M, gamma)");
  grid_cmd->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  grid_cmd->add_option("--M", Ms, "M grid (defaults to grid.M)")->delimiter(',');
  grid_cmd->add_option("--gamma", gammas, "gamma grid (defaults to grid.gamma)")->delimiter(',');
  grid_cmd->add_option("--metric", metric, "first_to_tolerance or final_mean_error");
  grid_cmd->add_option("--out", out_dir, "Output directory");

  std::string suite, report_path;
  auto* verify_cmd = app.add_subcommand("verify", "Run a verification suite");
  verify_cmd->add_option("suite", suite, "Suite name")
      ->required()
      ->check(CLI::IsMember(suite_names()));
  verify_cmd->add_option("--report", report_path, "Also write the JSON report here");

  auto* oracle_cmd = app.add_subcommand("oracle", "Closed-form oracles");
  oracle_cmd->require_subcommand(1);
  double L = 1.0, a = 1e4, M = 1e4, sigma2 = 25.0;
  std::size_t d = 5;
  bool per_coordinate = false;
  auto* stationary = oracle_cmd->add_subcommand(
      "stationary", "Long-run E||grad F||^2 of vanilla SPG on the quadratic instance");
  stationary->add_option("--L", L)->required();
  stationary->add_option("--a", a)->required();
  stationary->add_option("--M", M)->required();
  stationary->add_option("--sigma2", sigma2)->required();
  stationary->add_option("--d", d)->required();
  stationary->add_flag("--per-coordinate", per_coordinate, "sigma2 is per-coordinate variance");

  app.footer(fmt::format("Default output directory: ${} or ./spgm_out. Kernels: {}.",
                         kOutputDirEnv, spgm::kernels::active().name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return cmd_run(config_path, out_dir);
    if (*grid_cmd) return cmd_grid(config_path, Ms, gammas, metric, out_dir);
    if (*verify_cmd) return cmd_verify(suite, report_path);
    if (*stationary) {
      const double v = stationary_error_oracle(
          L, a, M, sigma2, d,
          per_coordinate ? NoiseConvention::kPerCoordinate : NoiseConvention::kTotalVariance);
      std::cout << fmt::format("{:.17g}\n", v);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
