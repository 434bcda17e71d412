#pragma once

#include <string>
#include <vector>

namespace nhspec {

/// One verified invariant family: how many instances ran, the worst
/// deviation seen, and the tolerance it was held against.
struct VerifyCheck {
  std::string name;
  int instances = 0;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Runs every invariant suite whose name contains `filter` (all of them for
/// an empty filter). Coverage: sizes 3..12 exhaustively plus spot checks up
/// to N = 50.
std::vector<VerifyCheck> run_verification(const std::string& filter = "");

bool all_passed(const std::vector<VerifyCheck>& checks);

}  // namespace nhspec
