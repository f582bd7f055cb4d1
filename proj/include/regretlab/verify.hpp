#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace regretlab {

// One row of the verification table. `measured` and `threshold` are
// preformatted so the table prints exactly what was compared.
struct CriterionResult {
  int id = 0;
  std::string claim;
  std::string measured;
  std::string threshold;
  bool pass = false;
};

struct VerificationReport {
  std::vector<CriterionResult> rows;
  bool all_pass() const;
};

// Runs the numbered verification suite. Selector `static` covers the exact
// membership/constant checks (8, 9, 11), `dynamics` the seeded simulation
// checks, `all` both in numeric order. Every tolerance and seed is pinned
// inside the implementation so reruns are reproducible.
VerificationReport run_verification(const std::string& selector);

// claim -> measured -> threshold -> pass table, one line per criterion.
void print_verification(const VerificationReport& report, std::ostream& out);

}  // namespace regretlab
