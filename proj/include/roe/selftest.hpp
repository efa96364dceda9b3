#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace roe {

/// Debug switches that deliberately break one piece of the pipeline so the
/// self-test can be seen to react.
struct SelftestFaults {
  /// Run the primary matcher with the reversed tie-break order.
  bool flip_tie_break = false;
  /// Feed a slightly non-unitary matrix to isomorphism construction.
  bool break_unitarity = false;
};

struct SelftestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs every invariant check at fixed seeds.
std::vector<SelftestResult> run_selftest(const SelftestFaults& faults = {});

/// Prints one line per check and a summary; returns the number of failures.
int print_selftest(const std::vector<SelftestResult>& results, std::ostream& out);

}  // namespace roe
