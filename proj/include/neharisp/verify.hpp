#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace neharisp {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Check {
  std::string name;
  std::function<CheckResult()> fn;
};

/// The property suite behind `nehari-sp verify`: the Poisson oracle, the
/// quadratic-map scalings and embedding bound, Nehari root agreement, the
/// ray-maximum identity at a converged state, the autonomous comparison
/// lattice, the Sobolev constant, the cutoff-bubble table, the critical-level
/// margins of the shipped configs, the gradient consistency check, and the
/// synthetic decay fits.
std::vector<Check> verify_checks(int threads);

struct VerifyOutcome {
  std::vector<CheckResult> results;
  bool all_pass = true;
};

/// Runs the (filtered) suite, printing one pass/fail line per property.
VerifyOutcome run_verify(const std::string& filter, int threads,
                         std::ostream& out);

}  // namespace neharisp
