// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace oed::verify {

struct Check {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// Oracle-equivalence and identity checks on built-in desk instances:
/// adjoint consistency, route equivalences, the Sylvester identity, Monte
/// Carlo exactness, sketch recovery, gradient correctness, and selection
/// ordering. Fast enough for a clean-build smoke gate.
std::vector<Check> run_suite();

/// Returns the number of failed checks after printing one line per check.
int run_and_report(std::ostream& out);

}  // namespace oed::verify
