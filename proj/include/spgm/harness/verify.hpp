#pragma once

// Named verification suites with pinned seeds and tolerances. Each produces
// a report serializable as {suite, checks: [{name, margin, stderr, pass}]}.
// A positive margin means the check holds with room to spare.

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace spgm::harness {

struct CheckEntry {
  std::string name;
  double margin = 0.0;
  double stderr_ = 0.0;
  bool pass = false;
  // Reported but not part of the suite verdict.
  bool informative = false;
  nlohmann::ordered_json detail = nlohmann::ordered_json::object();
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckEntry> checks;

  bool pass() const;
  nlohmann::ordered_json to_json() const;
};

// lemmas, lower_bound, sampling, prox_oracle, variance_reduction,
// rate_envelope, stationary_level, inexact, tolerance
std::vector<std::string> suite_names();

// Throws InvalidInput for an unknown name.
SuiteReport verify_suite(std::string_view name);

SuiteReport verify_lower_bound();
SuiteReport verify_stationary_level();
SuiteReport verify_tolerance();
SuiteReport verify_rate_envelope();
SuiteReport verify_variance_reduction();
SuiteReport verify_lemmas();
SuiteReport verify_prox_oracle();
SuiteReport verify_inexact();
SuiteReport verify_sampling();

}  // namespace spgm::harness
