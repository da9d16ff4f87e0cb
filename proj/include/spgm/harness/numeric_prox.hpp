#pragma once

// Slow long-double minimizers of the prox model, written without the closed
// forms. Used as an oracle for prox_exact.

#include "spgm/prox.hpp"

namespace spgm::harness {

// Throws UnsupportedProx for the smooth user kind.
Point numeric_prox(const ProxQuery& query, const ProxPart& psi);

// ||x - reference|| / max(1, ||reference||).
double relative_error(std::span<const double> x, std::span<const double> reference);

}  // namespace spgm::harness
