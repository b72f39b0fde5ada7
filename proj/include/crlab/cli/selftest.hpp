#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

// The acceptance gate: every tolerance is pinned here in code. Returns one
// result per criterion; the final entry is the whole-suite budget check.
std::vector<CriterionResult> run_acceptance(std::uint64_t seed = 1);

// prints "criterion <id> PASS/FAIL (<t> s): <name> -- <detail>" per entry;
// returns true when everything passed
bool print_acceptance(const std::vector<CriterionResult>& results);

} // namespace crlab
