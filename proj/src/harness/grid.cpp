#include "spgm/harness/grid.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

#include "spgm/harness/experiment.hpp"

namespace spgm::harness {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Seed-mean ||grad F||^2 curve of one (cell, seed); empty when the run blew up.
std::vector<double> curve_of(const ExperimentConfig& config, std::uint64_t seed) {
  try {
    const PreparedRun prepared = prepare(config);
    const RunResult r = run(prepared.problem, prepared.schedule, prepared.options, seed);
    std::vector<double> c(r.records.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = r.records[k].grad_norm_sq;
    return c;
  } catch (const InvalidInput&) {
    // Non-finite iterates reach the prox step as invalid input.
    return {};
  }
}

}  // namespace

GridResult grid_search(const ExperimentConfig& base, const std::vector<double>& M_grid,
                       const std::vector<double>& gamma_grid, GridMetric metric) {
  if (M_grid.empty()) throw InvalidInput("grid over M is empty");
  const bool vanilla = base.method == Method::kVanilla;
  const std::vector<double> gammas = vanilla ? std::vector<double>{1.0} : gamma_grid;
  if (gammas.empty()) throw InvalidInput("grid over gamma is empty");

  std::vector<ExperimentConfig> cell_configs;
  GridResult result;
  result.metric = metric;
  for (double M : M_grid) {
    for (double g : gammas) {
      ExperimentConfig c = base;
      c.variant = ScheduleVariant::kManual;
      c.M = M;
      c.gamma = g;
      c.validate();
      cell_configs.push_back(std::move(c));
      result.cells.push_back(GridCell{M, g, std::nullopt, 0.0, 0.0, false});
    }
  }

  const std::size_t n_seeds = base.seeds.size();
  std::vector<std::vector<double>> curves(cell_configs.size() * n_seeds);
  parallel_for(curves.size(), [&](std::size_t t) {
    curves[t] = curve_of(cell_configs[t / n_seeds], base.seeds[t % n_seeds]);
  });

  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    GridCell& cell = result.cells[c];
    std::size_t n = std::numeric_limits<std::size_t>::max();
    for (std::size_t s = 0; s < n_seeds; ++s) n = std::min(n, curves[c * n_seeds + s].size());
    std::vector<double> mean(n, 0.0);
    for (std::size_t s = 0; s < n_seeds; ++s) {
      const auto& curve = curves[c * n_seeds + s];
      for (std::size_t k = 0; k < n; ++k) mean[k] += curve[k];
    }
    for (double& v : mean) v /= static_cast<double>(n_seeds);

    cell.diverged = n == 0 && base.K > 0;
    for (double v : mean) {
      if (!std::isfinite(v)) cell.diverged = true;
    }
    if (cell.diverged) {
      cell.final_error = kInf;
      cell.score = kInf;
      continue;
    }
    cell.first_k = first_reach(mean, base.tolerance);
    const std::size_t window = std::min(std::max<std::size_t>(base.smoothing_window, 1), n);
    double tail = 0.0;
    for (std::size_t k = n - window; k < n; ++k) tail += mean[k];
    cell.final_error = window > 0 ? tail / static_cast<double>(window) : kInf;
    cell.score = metric == GridMetric::kFinalMeanError
                     ? cell.final_error
                     : (cell.first_k ? static_cast<double>(*cell.first_k) : kInf);
  }

  // Ties on the metric go to the lower final error, then to grid order.
  for (std::size_t c = 1; c < result.cells.size(); ++c) {
    const GridCell& a = result.cells[c];
    const GridCell& b = result.cells[result.best];
    if (a.score < b.score || (a.score == b.score && a.final_error < b.final_error)) {
      result.best = c;
    }
  }
  return result;
}

std::string grid_csv(const GridResult& result) {
  std::string out = "M,gamma,first_k,final_error,score,diverged,best\n";
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    const GridCell& cell = result.cells[c];
    out += fmt::format("{:.17g},{:.17g},{},{:.17g},{:.17g},{},{}\n", cell.M, cell.gamma,
                       cell.first_k ? fmt::format("{}", *cell.first_k) : std::string(),
                       cell.final_error, cell.score, cell.diverged ? 1 : 0,
                       c == result.best ? 1 : 0);
  }
  return out;
}

std::string grid_table(const GridResult& result) {
  std::string out = fmt::format("{:>12} {:>10} {:>10} {:>14}  {}\n", "M", "gamma", "first_k",
                                "final_error", "");
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    const GridCell& cell = result.cells[c];
    out += fmt::format("{:>12.6g} {:>10.3g} {:>10} {:>14.6g}  {}\n", cell.M, cell.gamma,
                       cell.first_k ? fmt::format("{}", *cell.first_k) : std::string("-"),
                       cell.final_error, c == result.best ? "<- best" : "");
  }
  return out;
}

}  // namespace spgm::harness
