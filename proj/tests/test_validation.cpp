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


#include <doctest.h>

#include <algorithm>

#include "twistsense/numeric.hpp"
#include "twistsense/validation.hpp"

using namespace twistsense;

TEST_CASE("validation suite passes on the closed forms") {
  ValidationOptions opt;
  opt.n_max = 6;
  const auto summary = run_validation(opt);
  for (const auto& c : summary.checks) {
    INFO(c.name << ": " << c.detail << " err=" << c.max_error << " tol=" << c.tolerance);
    CHECK(c.passed);
  }
  CHECK(summary.passed());
  CHECK(summary.failed_names().empty());
  const auto j = summary.to_json();
  CHECK(j.at("passed") == true);
  CHECK(j.at("checks").size() == summary.checks.size());
}

TEST_CASE("a perturbed closed form is caught") {
  ValidationOptions opt;
  opt.n_max = 4;
  opt.moment_perturbation["xx"] = 1e-3;
  const auto summary = run_validation(opt);
  CHECK_FALSE(summary.passed());
  const auto failed = summary.failed_names();
  CHECK(std::find(failed.begin(), failed.end(), "oat_closed_forms") != failed.end());
}

TEST_CASE("n_max range") {
  ValidationOptions opt;
  opt.n_max = 3;
  CHECK_THROWS_AS(run_validation(opt), InvalidRequest);
  opt.n_max = 13;
  CHECK_THROWS_AS(run_validation(opt), InvalidRequest);
}
