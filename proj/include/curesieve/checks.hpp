#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace curesieve {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // failing case, serialized
};

struct CheckOptions {
  std::uint64_t seed = 20260811;
  int rate_draws = 1000000;
  /// Test fixture: perturbs one analytic gradient coordinate so the
  /// finite-difference oracle must flag it.
  bool inject_gradient_fault = false;
};

/// Pre-build oracle harness: spline identities, analytic gradient vs central
/// finite differences, coefficient-form likelihood equivalence, and
/// reproduction of the data-generating process rates.
std::vector<CheckResult> run_checks(const CheckOptions& opts);

bool all_passed(const std::vector<CheckResult>& results);

// Individual oracles, also runnable standalone.
CheckResult check_spline_identities(std::uint64_t seed);
CheckResult check_gradient_oracle(std::uint64_t seed, bool inject_fault);
CheckResult check_equivalence_oracle(std::uint64_t seed);
CheckResult check_dgp_rates(std::uint64_t seed, int draws);

}  // namespace curesieve
