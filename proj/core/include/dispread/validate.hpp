#pragma once

#include <functional>
#include <string>
#include <vector>

namespace dispread {

/// Outcome of one registered check.
struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  std::string tolerance;
  std::string detail;
  /// True for the acceptance criteria, false for supporting invariants.
  bool criterion = true;
};

struct ValidationOptions {
  /// Looser integrator tolerances and a coarser optimizer grid.
  bool fast = false;
  /// Replaces the cavity decay operator with zero in the cold filtered runs.
  bool zero_cavity_decay = false;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  double seconds = 0.0;
  [[nodiscard]] bool all_passed() const;
};

/// Names of the registered checks in report order.
[[nodiscard]] std::vector<std::string> registered_checks();

/// Runs every registered check and reports each as it completes.
ValidationReport run_validation(const ValidationOptions& options,
                                const std::function<void(const CheckResult&)>& progress = {});

/// One report line: status, name, measured value, tolerance and detail.
[[nodiscard]] std::string format_check(const CheckResult& r);

}  // namespace dispread
