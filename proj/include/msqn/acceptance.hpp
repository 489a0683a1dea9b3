#pragma once
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace msqn {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Criteria to run; empty runs all fifteen.
  std::set<int> only;
  /// Negates Z2 in the factors checked by the oracle-equivalence criterion.
  bool mutate_z2_sign = false;
};

inline constexpr int kCriterionCount = 15;

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// One "[PASS] C1 name (1.2 s): detail" line per criterion.
void print_acceptance(const std::vector<CriterionResult>& results, std::ostream& out);

}  // namespace msqn
