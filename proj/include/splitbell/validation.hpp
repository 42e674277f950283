#pragma once

#include <string>
#include <vector>

namespace splitbell {

/// One compared quantity. `relation` is one of "<=", ">=", ">", "in", "bits==",
/// "increasing"; `limit` (and `upper` for "in") are the pinned bounds.
struct Measurement {
  std::string quantity;
  double measured = 0.0;
  std::string relation;
  double limit = 0.0;
  double upper = 0.0;
  bool passed = false;
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::vector<Measurement> measurements;
  std::string error;  ///< set when the check itself threw
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  std::string to_json() const;
};

struct ValidationOptions {
  int jobs = 1;
  /// Criteria to run (1..9); empty runs all.
  std::vector<int> only;
  /// Ceiling of the full-range sweeps.
  int k_cut = 40;
};

constexpr int kCriterionCount = 9;

/// Runs the acceptance criteria; individual failures are recorded, not thrown.
ValidationReport run_validation(const ValidationOptions& options = {});

}  // namespace splitbell
