#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sobocert {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the full verification suite, printing one pass/fail line per
/// criterion to `log`. Returns the per-criterion results.
std::vector<CriterionResult> run_acceptance(std::ostream& log,
                                            int threads = 1);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace sobocert
