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

// Error-propagation estimator covariance for the joint (J^2, J_y)
// measurement, the covariance bounds it is compared against, and the
// scaling sweeps built on top of them.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "twistsense/collective.hpp"

namespace twistsense {

class UnidentifiablePhaseError : public InvalidRequest {
 public:
  using InvalidRequest::InvalidRequest;
};

/// Normalization of the reported variances: the general bound maps to 1.
inline constexpr const char* kNormalizationNote =
    "norm_var_eta = N*Var(eta)/(1-eta^2); norm_var_phi = N*eta^2*Var(phi)/(1-eta^2)";

/// Closed-form inverse of a 2x2 matrix; throws NumericalError when the
/// determinant is negligible relative to the entry scale.
Eigen::Matrix2d invert2(const Eigen::Matrix2d& m);

/// [D^T Sigma^{-1} D]^{-1} for a full-rank Jacobian and observable covariance.
Eigen::Matrix2d propagate_error(const Eigen::Matrix2d& jacobian, const Eigen::Matrix2d& observable_cov);

struct EstimatorCovariance {
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  std::vector<std::string> flags;
};

/// Sigma(eta~, phi~) at phi = 0 from the exact observable statistics.
/// eta = 0 throws UnidentifiablePhaseError; eta = 1 returns Var(eta~) = 0
/// with the "eta_noiseless_limit" flag.
EstimatorCovariance estimator_covariance(const SqueezingConfig& config, const ChannelParams& params,
                                         Precision precision = Precision::Auto);
EstimatorCovariance estimator_covariance(const ObservableStats& stats, double eta);

/// (1/N) diag(1 - eta^2, (1 - eta^2)/eta^2); the phi entry is +inf at eta = 0.
Eigen::Matrix2d fundamental_bound(std::int64_t n, double eta);
/// (1/N) diag(1 - eta^2, 1/eta^2); the phi entry is +inf at eta = 0.
Eigen::Matrix2d product_bound(std::int64_t n, double eta);

struct ProtocolReport {
  SqueezingConfig config;
  ChannelParams params;
  ObservableStats stats;
  Eigen::Matrix2d est_cov = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d bound_general = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d bound_product = Eigen::Matrix2d::Zero();
  std::array<double, 2> normalized{};  // NaN / inf at the eta edges, see flags
  std::vector<std::string> flags;
};

/// Full protocol evaluation at phi = 0. The eta edges produce flagged limit
/// values instead of errors.
ProtocolReport evaluate_protocol(const SqueezingConfig& config, double eta, Precision precision = Precision::Auto);

nlohmann::json to_json(const ProtocolReport& report);

/// Squeezing exponent with its literal label; "inf" stands for chi = 0.
struct ExponentSpec {
  double p;           // -infinity for chi = 0
  std::string label;  // as given by the user
  static ExponentSpec parse(const std::string& token);
};

struct SweepRecord {
  std::int64_t n;
  ExponentSpec p;
  double chi;
  double eta;
  double normalized_eta_var;
  double normalized_phi_var;
};

/// Log-spaced integer grid [n_min, n_max] with duplicates removed.
std::vector<std::int64_t> log_spaced_grid(std::int64_t n_min, std::int64_t n_max, int points);

/// One record per (p, n), sorted by (p, n); chi = 0 sorts first.
std::vector<SweepRecord> sweep(double eta, const std::vector<ExponentSpec>& p_list,
                               const std::vector<std::int64_t>& n_grid);

inline constexpr const char* kSweepCsvHeader = "n,p,chi,eta,norm_var_eta,norm_var_phi";

/// CSV with a leading '#' metadata line followed by kSweepCsvHeader.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records);

/// Predicted decay exponents of |normalized - 1| for chi = N^p.
double predicted_eta_exponent(double p);
double predicted_phi_exponent(double p);
/// Exponent balancing the two Var(J_y) error terms N^{2+4p} and N^{-2-2p}.
double jy_error_balance_exponent();

struct ExpansionDiagnostics {
  double p;
  double eta;
  double fitted_eta_slope;
  double predicted_eta_slope;
  double fitted_phi_slope;
  double predicted_phi_slope;
  std::vector<SweepRecord> samples;
};

/// Least-squares log-log slopes of |normalized - 1| against N along chi = N^p.
ExpansionDiagnostics expansion_diagnostics(double p, double eta, const std::vector<std::int64_t>& n_grid);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace twistsense
