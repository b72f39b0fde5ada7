// Acceptance gate: runs every criterion at its pinned tolerance and prints one
// pass/fail line per criterion.

#include <cstdio>

#include "crlab/cli/selftest.hpp"

int main() {
  auto results = crlab::run_acceptance(1);
  bool ok = crlab::print_acceptance(results);
  if (!ok) {
    std::printf("acceptance: FAILURES PRESENT\n");
    return 1;
  }
  std::printf("acceptance: all criteria passed\n");
  return 0;
}
