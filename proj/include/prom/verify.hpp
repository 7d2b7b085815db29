#pragma once

// Invariant suites runnable from the command line (`prom verify`).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace prom {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<CheckResult> run_invariant_suite(std::uint64_t seed);

/// Print one line per check; returns true if all passed.
bool print_checks(const std::vector<CheckResult>& checks, std::ostream& os);

}  // namespace prom
