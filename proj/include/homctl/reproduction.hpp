#pragma once

#include <string>
#include <vector>

namespace homctl {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Names of the reproduction criteria, in order.
std::vector<std::string> reproduction_criteria();

/// Runs the whole reproduction suite against the bundled reference design.
/// Each criterion records pass/fail plus a short numeric detail string.
std::vector<CriterionResult> run_reproduction_suite();

/// Prints one PASS/FAIL line per criterion to stdout; returns true when all
/// criteria pass.
bool print_reproduction_results(const std::vector<CriterionResult>& results);

}  // namespace homctl
