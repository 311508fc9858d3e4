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

#include "twistsense/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace twistsense {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

nlohmann::json matrix_json(const Eigen::Matrix2d& m) {
  return nlohmann::json::array({nlohmann::json::array({number_or_null(m(0, 0)), number_or_null(m(0, 1))}),
                                nlohmann::json::array({number_or_null(m(1, 0)), number_or_null(m(1, 1))})});
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Eigen::Matrix2d invert2(const Eigen::Matrix2d& m) {
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double scale = m.cwiseAbs().maxCoeff();
  if (!std::isfinite(det) || scale == 0.0 || std::abs(det) <= 1e-300 * scale * scale)
    throw NumericalError("2x2 matrix is singular to working precision");
  Eigen::Matrix2d inv;
  inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return inv / det;
}

Eigen::Matrix2d propagate_error(const Eigen::Matrix2d& jacobian, const Eigen::Matrix2d& observable_cov) {
  const Eigen::Matrix2d info = jacobian.transpose() * invert2(observable_cov) * jacobian;
  Eigen::Matrix2d cov = invert2(0.5 * (info + info.transpose()));
  return 0.5 * (cov + cov.transpose());
}

EstimatorCovariance estimator_covariance(const ObservableStats& stats, double eta) {
  if (eta <= 0.0)
    throw UnidentifiablePhaseError("eta = 0: <J_y> carries no phase information (Jacobian phi column vanishes)");
  EstimatorCovariance out;
  if (eta >= 1.0 || stats.var_j2 == 0.0) {
    // Var(J^2) = 0: J^2 is sharp, so eta is determined without error.
    out.flags.push_back("eta_noiseless_limit");
    const double d_phi = stats.jacobian(1, 1);
    out.cov(1, 1) = stats.var_jy / (d_phi * d_phi);
    return out;
  }
  out.cov = propagate_error(stats.jacobian, stats.covariance());
  return out;
}

EstimatorCovariance estimator_covariance(const SqueezingConfig& config, const ChannelParams& params,
                                         Precision precision) {
  if (params.eta() <= 0.0)
    throw UnidentifiablePhaseError("eta = 0: <J_y> carries no phase information (Jacobian phi column vanishes)");
  return estimator_covariance(observable_covariance(config, params, precision), params.eta());
}

Eigen::Matrix2d fundamental_bound(std::int64_t n, double eta) {
  if (n < 1) throw InvalidRequest("fundamental_bound: n must be >= 1");
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidRequest("fundamental_bound: eta must lie in [0, 1]");
  const double nn = static_cast<double>(n);
  const double loss = 1.0 - eta * eta;
  Eigen::Matrix2d b = Eigen::Matrix2d::Zero();
  b(0, 0) = loss / nn;
  b(1, 1) = eta == 0.0 ? kInf : loss / (eta * eta) / nn;
  return b;
}

Eigen::Matrix2d product_bound(std::int64_t n, double eta) {
  if (n < 1) throw InvalidRequest("product_bound: n must be >= 1");
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidRequest("product_bound: eta must lie in [0, 1]");
  const double nn = static_cast<double>(n);
  Eigen::Matrix2d b = Eigen::Matrix2d::Zero();
  b(0, 0) = (1.0 - eta * eta) / nn;
  b(1, 1) = eta == 0.0 ? kInf : 1.0 / (eta * eta) / nn;
  return b;
}

ProtocolReport evaluate_protocol(const SqueezingConfig& config, double eta, Precision precision) {
  const ChannelParams params(eta, 0.0);
  const Eigen::Matrix2d zero = Eigen::Matrix2d::Zero();
  ProtocolReport report{config, params, observable_covariance(config, params, precision), zero, zero, zero, {}, {}};
  report.bound_general = fundamental_bound(config.n(), eta);
  report.bound_product = product_bound(config.n(), eta);
  const double n = static_cast<double>(config.n());
  const double loss = 1.0 - eta * eta;

  if (eta == 0.0) {
    // Both Jacobian entries vanish; only the eta-free phi ratio survives.
    report.flags.push_back("eta_zero_limit");
    report.est_cov(0, 0) = kInf;
    report.est_cov(1, 1) = kInf;
    const double sx = roat_moments(config).at("x");
    report.normalized = {kNaN, 4.0 * report.stats.var_jy / (n * sx * sx)};
    return report;
  }

  auto est = estimator_covariance(report.stats, eta);
  report.est_cov = est.cov;
  report.flags.insert(report.flags.end(), est.flags.begin(), est.flags.end());
  if (eta == 1.0) {
    report.normalized = {kNaN, kInf};
  } else {
    report.normalized = {n * report.est_cov(0, 0) / loss, n * eta * eta * report.est_cov(1, 1) / loss};
  }
  for (const auto& w : report.stats.warnings) report.flags.push_back("warning: " + w);
  return report;
}

nlohmann::json to_json(const ProtocolReport& r) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["normalization"] = kNormalizationNote;
  j["n"] = r.config.n();
  j["chi"] = r.config.chi();
  if (r.config.p()) {
    j["p"] = std::isinf(*r.config.p()) ? nlohmann::json("inf") : nlohmann::json(*r.config.p());
  } else {
    j["p"] = nullptr;
  }
  j["epsilon"] = r.config.epsilon();
  j["eta"] = r.params.eta();
  j["phi"] = r.params.phi();
  j["stats"] = {
      {"mean_jy", r.stats.mean_jy},
      {"mean_j2", r.stats.mean_j2},
      {"var_jy", r.stats.var_jy},
      {"var_j2", r.stats.var_j2},
      {"cov_j2_jy", r.stats.cov_j2_jy},
      {"jacobian", matrix_json(r.stats.jacobian)},
  };
  j["est_cov"] = matrix_json(r.est_cov);
  j["bound_general"] = matrix_json(r.bound_general);
  j["bound_product"] = matrix_json(r.bound_product);
  j["normalized"] = {{"norm_var_eta", number_or_null(r.normalized[0])},
                     {"norm_var_phi", number_or_null(r.normalized[1])}};
  j["flags"] = r.flags;
  return j;
}

ExponentSpec ExponentSpec::parse(const std::string& token) {
  if (token == "inf" || token == "-inf" || token == "chi0")
    return {-std::numeric_limits<double>::infinity(), token};
  double p = 0.0;
  try {
    const auto slash = token.find('/');
    if (slash != std::string::npos) {
      p = std::stod(token.substr(0, slash)) / std::stod(token.substr(slash + 1));
    } else {
      std::size_t used = 0;
      p = std::stod(token, &used);
      if (used != token.size()) throw InvalidRequest("trailing characters");
    }
  } catch (const std::exception&) {
    throw InvalidRequest("cannot parse exponent '" + token + "'");
  }
  if (!std::isfinite(p) || p > 0.0) throw InvalidRequest("exponent must be <= 0, got '" + token + "'");
  return {p, token};
}

std::vector<std::int64_t> log_spaced_grid(std::int64_t n_min, std::int64_t n_max, int points) {
  if (n_min < 2 || n_max < n_min || points < 1) throw InvalidRequest("invalid log-spaced grid bounds");
  std::vector<std::int64_t> grid;
  const double lo = std::log10(static_cast<double>(n_min));
  const double hi = std::log10(static_cast<double>(n_max));
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    const auto n = static_cast<std::int64_t>(std::llround(std::pow(10.0, lo + t * (hi - lo))));
    if (grid.empty() || grid.back() != n) grid.push_back(std::clamp(n, n_min, n_max));
  }
  return grid;
}

std::vector<SweepRecord> sweep(double eta, const std::vector<ExponentSpec>& p_list,
                               const std::vector<std::int64_t>& n_grid) {
  std::vector<SweepRecord> records;
  for (const auto& spec : p_list) {
    for (std::int64_t n : n_grid) {
      const auto config = SqueezingConfig::from_exponent(n, spec.p);
      const auto report = evaluate_protocol(config, eta);
      records.push_back({n, spec, config.chi(), eta, report.normalized[0], report.normalized[1]});
    }
  }
  std::stable_sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    if (a.p.p != b.p.p) return a.p.p < b.p.p;
    return a.n < b.n;
  });
  return records;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  os << "# " << kVersion << "; " << kNormalizationNote << "; p=inf encodes chi=0\n";
  os << kSweepCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.n << ',' << r.p.label << ',' << format_double(r.chi) << ',' << format_double(r.eta) << ','
       << format_double(r.normalized_eta_var) << ',' << format_double(r.normalized_phi_var) << '\n';
  }
}

double predicted_eta_exponent(double p) { return 3.0 + 4.0 * p; }

double predicted_phi_exponent(double p) { return std::max(1.0 + 2.0 * p, -2.0 - 2.0 * p); }

double jy_error_balance_exponent() {
  // 2 + 4p = -2 - 2p
  return -4.0 / 6.0;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidRequest("fit_slope needs >= 2 paired points");
  const double k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw InvalidRequest("fit_slope: x values are all equal");
  return sxy / sxx;
}

ExpansionDiagnostics expansion_diagnostics(double p, double eta, const std::vector<std::int64_t>& n_grid) {
  if (!(p > -1.0 && p < -0.5)) throw InvalidRequest("expansion_diagnostics: p must lie in (-1, -1/2)");
  ExpansionDiagnostics d{p, eta, kNaN, predicted_eta_exponent(p), kNaN, predicted_phi_exponent(p), {}};
  d.samples = sweep(eta, {ExponentSpec{p, format_double(p)}}, n_grid);
  std::vector<double> log_n, log_eta, log_phi;
  for (const auto& r : d.samples) {
    log_n.push_back(std::log(static_cast<double>(r.n)));
    log_eta.push_back(std::log(std::abs(r.normalized_eta_var - 1.0)));
    log_phi.push_back(std::log(std::abs(r.normalized_phi_var - 1.0)));
  }
  d.fitted_eta_slope = fit_slope(log_n, log_eta);
  d.fitted_phi_slope = fit_slope(log_n, log_phi);
  return d;
}

}  // namespace twistsense
