#pragma once

#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "spgm/error.hpp"

namespace spgm {

// A point (or direction) in R^d. Dimension is fixed per problem.
using Point = std::vector<double>;

inline bool all_finite(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

inline void require_finite(std::span<const double> x, std::string_view what) {
  if (!all_finite(x)) {
    throw InvalidInput(std::string(what) + " has non-finite entries");
  }
}

inline void require_dimension(std::span<const double> x, std::size_t d,
                              std::string_view what) {
  if (x.size() != d) {
    throw InvalidInput(std::string(what) + " has dimension " +
                       std::to_string(x.size()) + ", expected " +
                       std::to_string(d));
  }
}

}  // namespace spgm
