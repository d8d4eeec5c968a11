#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace polaudit::check {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteOptions {
  double step_deg = 1.0;
  /// Trials for the Monte Carlo suites.
  std::uint64_t mc_trials = 200000;
  std::uint64_t seed = 12345;
  unsigned threads = 1;
};

/// Runs every invariant suite on the grid of `options.step_deg`.
std::vector<SuiteResult> run_invariant_suites(const SuiteOptions& options);

}  // namespace polaudit::check
