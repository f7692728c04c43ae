#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace imcf {

struct AcceptanceOptions {
  /// Grid resolution used by every criterion; 0 keeps each criterion's default.
  int resolution = 0;
  /// Criteria to run (1-based); empty runs all.
  std::vector<int> only;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the acceptance criteria, printing one line per criterion to `log` as it finishes:
///   criterion <id> <PASS|FAIL> <name> | <detail>
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& log);

std::string format_result(const CriterionResult& result);

}  // namespace imcf
