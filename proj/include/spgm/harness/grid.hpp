#pragma once

// Grid search over manual (M, gamma) cells. Every cell runs all seeds of the
// base config; the vanilla method ignores the gamma grid.

#include <optional>
#include <string>
#include <vector>

#include "spgm/harness/config.hpp"

namespace spgm::harness {

struct GridCell {
  double M = 0.0;
  double gamma = 1.0;
  std::optional<std::size_t> first_k;  // first k >= 1 with seed mean <= tolerance
  double final_error = 0.0;  // seed mean of ||grad F||^2 over the last smoothing window
  double score = 0.0;        // lower is better
  bool diverged = false;
};

struct GridResult {
  std::vector<GridCell> cells;  // M-major order
  std::size_t best = 0;
  GridMetric metric = GridMetric::kFirstToTolerance;

  const GridCell& best_cell() const { return cells.at(best); }
};

// Throws InvalidInput on an empty grid.
GridResult grid_search(const ExperimentConfig& base, const std::vector<double>& M_grid,
                       const std::vector<double>& gamma_grid, GridMetric metric);

std::string grid_csv(const GridResult& result);
// Fixed-width text table with the best cell marked.
std::string grid_table(const GridResult& result);

}  // namespace spgm::harness
