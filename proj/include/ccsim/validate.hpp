#pragma once

#include <string>
#include <vector>

// Analytic-limit checks of the propagation engine: closed-form linear
// response, self-phase-modulation closed form, span energy conservation,
// ASE statistics, the multi-span ASE SNR budget, and split-step
// self-convergence.

namespace ccsim::validate {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// quick skips the self-convergence study (the one check that needs a
// nonlinear multi-step propagation).
std::vector<CheckResult> run_checks(bool quick = false);

}  // namespace ccsim::validate
