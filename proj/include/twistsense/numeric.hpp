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

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace twistsense {

inline constexpr const char* kVersion = "twistsense 1.0.0";

// Numeric policy shared by every module.
namespace tol {
inline constexpr double kPsdSlack = 1e-12;          // density-operator eigenvalue / trace slack
inline constexpr double kCompleteness = 1e-15;      // sum K^dag K = 1
inline constexpr double kProbabilityClamp = 1e-12;  // negative probabilities clamped above this
inline constexpr double kNegativeVarianceRel = 1e-9;
inline constexpr double kEigenCluster = 1e-8;       // J^2 eigenvalue clustering
inline constexpr double kDegeneracyResidual = 1e-9;
inline constexpr double kFiniteDifferenceStep = 1e-5;
}  // namespace tol

// Above this particle count the closed-form pipeline switches to Extended.
inline constexpr std::int64_t kExtendedPrecisionThreshold = 1'000'000;

// 113-bit binary float; roughly double-double precision.
using Extended = boost::multiprecision::cpp_bin_float_quad;

enum class Precision { Auto, Double, Extended };

class InvalidRequest : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IncompleteTableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class Real>
inline Real pi_v() {
  return boost::math::constants::pi<Real>();
}
template <>
inline double pi_v<double>() {
  return 3.14159265358979323846;
}

/// log(cos(theta)) for cos(theta) > 0, without forming cos(theta) - 1.
template <class Real>
Real log_cos(const Real& theta) {
  using std::log1p;
  using std::sin;
  const Real s = sin(theta / 2);
  return log1p(-2 * s * s);
}

/// cos(theta)^m for an integer power m >= 0.
///
/// Uses exp(m log cos) so that N ~ 1e8 powers of cos(chi ~ 1e-7) keep full
/// relative precision. Negative cosines (2chi, 3chi, 4chi past pi/2) carry
/// the sign of the integer power.
template <class Real>
Real cos_power(const Real& theta, std::int64_t m) {
  using std::abs;
  using std::cos;
  using std::exp;
  using std::log;
  if (m < 0) throw InvalidRequest("cos_power: negative exponent");
  if (m == 0) return Real(1);
  const Real c = cos(theta);
  if (c > 0) return exp(Real(m) * log_cos(theta));
  if (c == 0) return Real(0);
  const Real mag = exp(Real(m) * log(abs(c)));
  return (m % 2 == 0) ? mag : Real(-mag);
}

/// 1 - cos(theta)^m with the small-difference branch computed via expm1.
template <class Real>
Real one_minus_cos_power(const Real& theta, std::int64_t m) {
  using std::cos;
  using std::expm1;
  if (m < 0) throw InvalidRequest("one_minus_cos_power: negative exponent");
  if (m == 0) return Real(0);
  if (cos(theta) > 0) return -expm1(Real(m) * log_cos(theta));
  return Real(1) - cos_power(theta, m);
}

inline double to_double(double x) { return x; }
template <class Real>
double to_double(const Real& x) {
  return x.template convert_to<double>();
}

}  // namespace twistsense
