// Copyright 2026 The twistsense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Cross-module checks of the closed forms against the brute-force oracle.

#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace twistsense {

struct CheckResult {
  std::string name;
  bool passed;
  double max_error;
  double tolerance;
  std::string detail;
};

struct ValidationOptions {
  int n_max = 8;
  /// Tolerance of the moment-equivalence checks; the other checks use their
  /// own fixed tolerances.
  double tol = 1e-10;
  /// Density-matrix checks stop at min(n_max, density_n_cap).
  int density_n_cap = 10;
  /// Test fixture: added to the closed-form OAT value of the given words.
  std::map<std::string, double> moment_perturbation;
};

struct ValidationSummary {
  std::vector<CheckResult> checks;

  bool passed() const;
  std::vector<std::string> failed_names() const;
  nlohmann::json to_json() const;
};

/// Requires 4 <= n_max <= 12.
ValidationSummary run_validation(const ValidationOptions& options);

}  // namespace twistsense
