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

#include "twistsense/collective.hpp"

#include <cstdio>
#include <iostream>

namespace twistsense {

namespace {

void require_phase_zero(const ChannelParams& params, const char* what) {
  if (params.phi() != 0.0)
    throw InvalidRequest(std::string(what) + " is only available in closed form at phi = 0");
}

// Rounding can push an exact zero variance slightly negative; anything
// beyond the slack is a logic error.
double clamp_variance(double value, double scale, const char* name, std::vector<std::string>* warnings) {
  if (value >= 0.0) return value;
  if (value >= -tol::kNegativeVarianceRel * scale) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", value);
    const std::string msg = std::string(name) + " = " + buf + " clamped to 0";
    std::clog << "twistsense: warning: " << msg << '\n';
    if (warnings) warnings->push_back(msg);
    return 0.0;
  }
  throw NumericalError(std::string(name) + " is negative beyond rounding slack: " + std::to_string(value));
}

template <class Real>
detail::ExactStats<Real> stats_in(const SqueezingConfig& config, const ChannelParams& params) {
  return detail::exact_stats<Real>(config, params, Real(config.chi()));
}

}  // namespace

Eigen::Matrix2d ObservableStats::covariance() const {
  Eigen::Matrix2d m;
  m << var_j2, cov_j2_jy, cov_j2_jy, var_jy;
  return m;
}

bool uses_extended(std::int64_t n, Precision precision) {
  switch (precision) {
    case Precision::Double: return false;
    case Precision::Extended: return true;
    case Precision::Auto: return n > kExtendedPrecisionThreshold;
  }
  return false;
}

double mean_jy(const SqueezingConfig& config, const ChannelParams& params) {
  const auto roat = roat_moments(config);
  return static_cast<double>(config.n()) / 2.0 * output_moments(roat, params).at("y");
}

double mean_j2(const SqueezingConfig& config, const ChannelParams& params) {
  const auto out = output_moments(roat_moments(config), params);
  const double n = static_cast<double>(config.n());
  return 3.0 * n / 4.0 + n * (n - 1.0) / 4.0 * (out.at("xx") + out.at("yy") + out.at("zz"));
}

double var_jy(const SqueezingConfig& config, const ChannelParams& params) {
  require_phase_zero(params, "Var(J_y)");
  const double n = static_cast<double>(config.n());
  const double eta = params.eta();
  const double value = (n + eta * eta * n * (n - 1.0) * roat_moments(config).at("yy")) / 4.0;
  return clamp_variance(value, n * n / 4.0, "Var(J_y)", nullptr);
}

double fourth_moment_combinatorics(Axis i, Axis j, const SqueezingConfig& config, const ChannelParams& params,
                                   Precision precision) {
  if (uses_extended(config.n(), precision)) {
    const auto roat = roat_moments_t<Extended>(config, Extended(config.chi()));
    return to_double(detail::cov_squares<Extended>(i, j, output_moments_t<Extended>(roat, params)));
  }
  return detail::cov_squares<double>(i, j, output_moments(roat_moments(config), params));
}

double var_j2(const SqueezingConfig& config, const ChannelParams& params, Precision precision) {
  const double n = static_cast<double>(config.n());
  const double value = uses_extended(config.n(), precision) ? to_double(stats_in<Extended>(config, params).var_j2)
                                                            : stats_in<double>(config, params).var_j2;
  return clamp_variance(value, n * n * n * n / 16.0, "Var(J^2)", nullptr);
}

ObservableStats observable_covariance(const SqueezingConfig& config, const ChannelParams& params,
                                      Precision precision) {
  require_phase_zero(params, "Sigma(J^2, J_y)");
  ObservableStats out;
  auto fill = [&](const auto& s) {
    out.mean_jy = to_double(s.mean_jy);
    out.mean_j2 = to_double(s.mean_j2);
    out.var_jy = to_double(s.var_jy);
    out.var_j2 = to_double(s.var_j2);
    out.jacobian(0, 0) = to_double(s.d_j2_d_eta);
    out.jacobian(1, 1) = to_double(s.d_jy_d_phi);
  };
  if (uses_extended(config.n(), precision))
    fill(stats_in<Extended>(config, params));
  else
    fill(stats_in<double>(config, params));

  // <J^2> does not depend on phi and <J_y> is stationary in eta at phi = 0;
  // Cov(J^2, J_y) vanishes by the e^{i pi J_x} symmetry of the ROAT state.
  out.jacobian(0, 1) = 0.0;
  out.jacobian(1, 0) = 0.0;
  out.cov_j2_jy = 0.0;

  const double n = static_cast<double>(config.n());
  out.var_jy = clamp_variance(out.var_jy, n * n / 4.0, "Var(J_y)", &out.warnings);
  out.var_j2 = clamp_variance(out.var_j2, n * n * n * n / 16.0, "Var(J^2)", &out.warnings);
  return out;
}

std::vector<IndexClass> index_class_counts(std::int64_t n_int, bool same_axis) {
  const long double n = static_cast<long double>(n_int);
  if (same_axis) {
    return {
        {"all different", n * (n - 1) * (n - 2) * (n - 3)},
        {"one pair equal", 6 * n * (n - 1) * (n - 2)},
        {"three equal", 4 * n * (n - 1)},
        {"two pairs", 3 * n * (n - 1)},
        {"four equal", n},
    };
  }
  return {
      {"all different", n * (n - 1) * (n - 2) * (n - 3)},
      {"one of k,l equals one of m,n", 4 * n * (n - 1) * (n - 2)},
      {"pair or triplet with k = l", n * n * (n - 1)},
      {"pair or triplet with m = n", n * n * (n - 1)},
      {"crossed pairs", 2 * n * (n - 1)},
      {"k = l and m = n", n * n},
  };
}

}  // namespace twistsense
