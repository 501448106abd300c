// matopt/selfcheck.hpp
//
// Copyright 2026 The matopt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MATOPT_SELFCHECK_HPP
#define MATOPT_SELFCHECK_HPP

#include <string>
#include <vector>

#include "matopt/polar.hpp"

namespace matopt {

// Fast oracle suites behind the `selfcheck` command: each one replays a
// reduced version of the module-level verification (candidate dominance
// for the preconditioned LMOs, duality identities, polar-vs-SVD accuracy,
// finite-difference gradient checks).
struct SuiteResult {
  std::string name;
  int checks = 0;
  int failures = 0;
  double worst_gap = 0.0;  // the largest violation / error encountered
  bool passed() const { return failures == 0; }
};

SuiteResult selfcheck_lmo(int instances = 12, int candidates = 200);
SuiteResult selfcheck_duality(int instances = 60);
SuiteResult selfcheck_polar(const PolarSchedule& quintic = PolarSchedule::quintic_default(),
                            int instances = 40);
SuiteResult selfcheck_gradients(int probes = 20);

// Runs the suites whose name contains `filter` (all when empty). Valid
// names: lmo, duality, polar, gradcheck.
std::vector<SuiteResult> run_selfchecks(const std::string& filter = "");

}  // namespace matopt

#endif  // MATOPT_SELFCHECK_HPP
