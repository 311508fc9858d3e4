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


// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "twistsense/estimation.hpp"
#include "twistsense/oracle.hpp"
#include "twistsense/validation.hpp"

using namespace twistsense;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<int> first_sites(std::size_t k) {
  std::vector<int> s(k);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const ValidationSummary& oracle_summary() {
  static const ValidationSummary summary = [] {
    ValidationOptions opt;
    opt.n_max = 10;
    opt.density_n_cap = 10;
    const auto t0 = Clock::now();
    auto s = run_validation(opt);
    std::printf("  (oracle validation suite, N = 4..10: %.1f s)\n", seconds_since(t0));
    return s;
  }();
  return summary;
}

Outcome from_checks(std::initializer_list<const char*> names) {
  const auto& summary = oracle_summary();
  Outcome o{true, ""};
  for (const char* name : names) {
    const auto it = std::find_if(summary.checks.begin(), summary.checks.end(),
                                 [&](const CheckResult& c) { return c.name == name; });
    if (it == summary.checks.end()) return {false, std::string("missing check ") + name};
    o.passed &= it->passed;
    std::ostringstream os;
    os << name << "=" << it->max_error << (it->passed ? "" : " (FAIL, tol " + fmt("%g", it->tolerance) + ")") << "; ";
    o.detail += os.str();
  }
  return o;
}

Outcome criterion_1() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string where;
  for (int n = 4; n <= 10; ++n) {
    for (double chi : {0.05, 0.3, 0.7}) {
      const auto config = SqueezingConfig::from_chi(n, chi);
      const auto oat_state = oracle::build_oat_state(n, chi);
      const auto roat_state = oracle::build_roat_state(n, chi);
      const ChannelParams params(0.8, 0.5);
      const auto rho = oracle::evolve_density(roat_state, params);
      const auto roat = roat_moments(config);
      const auto out = output_moments(roat, params);
      for (const auto& w : all_words(4)) {
        const auto sites = first_sites(w.size());
        const double e = std::max({std::abs(oat_moment(w, n, chi) - oracle::exact_moment(oat_state, w, sites)),
                                   std::abs(roat.at(w) - oracle::exact_moment(roat_state, w, sites)),
                                   std::abs(out.at(w) - oracle::exact_moment(rho, w, sites))});
        if (e > worst) {
          worst = e;
          where = "n=" + std::to_string(n) + " chi=" + fmt("%g", chi) + " word=" + w.str();
        }
      }
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-10 && t <= 60.0,
          "max abs error " + fmt("%.3g", worst) + " at " + where + ", " + fmt("%.1f s", t)};
}

Outcome criterion_4() {
  auto o = from_checks({"odd_yz_zeros", "cov_j2_jy_zero_at_phi0", "j2_phi_independence", "var_j2_zero_at_eta1"});
  double worst = 0.0;
  for (std::int64_t n : log_spaced_grid(4, 10000, 40)) {
    const auto config = SqueezingConfig::from_chi(n, std::pow(static_cast<double>(n), -2.0 / 3.0));
    const double v = var_j2(config, ChannelParams(1.0, 0.0));
    worst = std::max(worst, std::abs(v) / std::pow(static_cast<double>(n), 3.0));
  }
  o.passed &= worst <= 1e-6;
  o.detail += "closed-form Var(J^2)/N^3 at eta=1 up to N=1e4: " + fmt("%.3g", worst);
  return o;
}

Outcome criterion_5() {
  auto o = from_checks({"jacobian_finite_difference"});
  bool exact_zero = true;
  for (std::int64_t n : {4, 10, 1000, 100000000}) {
    for (double eta : {0.5, 0.8}) {
      const auto d = observable_covariance(SqueezingConfig::from_chi(n, 0.3 * std::pow(n / 4.0, -0.75)),
                                           ChannelParams(eta, 0.0))
                         .jacobian;
      exact_zero &= d(0, 1) == 0.0 && d(1, 0) == 0.0;
    }
  }
  o.passed &= exact_zero;
  o.detail += exact_zero ? "analytic off-diagonals exactly 0" : "analytic off-diagonal nonzero";
  return o;
}

const std::vector<ExponentSpec>& fig_exponents() {
  static const std::vector<ExponentSpec> specs{ExponentSpec::parse("inf"), ExponentSpec::parse("-2/3"),
                                               ExponentSpec::parse("-3/4"), ExponentSpec::parse("-5/6")};
  return specs;
}

std::vector<SweepRecord> series(const std::vector<SweepRecord>& all, const std::string& label) {
  std::vector<SweepRecord> out;
  for (const auto& r : all)
    if (r.p.label == label) out.push_back(r);
  return out;
}

const SweepRecord& at_n(const std::vector<SweepRecord>& s, std::int64_t n) {
  return *std::min_element(s.begin(), s.end(), [&](const SweepRecord& a, const SweepRecord& b) {
    return std::abs(std::log(double(a.n) / n)) < std::abs(std::log(double(b.n) / n));
  });
}

bool decreasing_from(const std::vector<SweepRecord>& s, std::int64_t n0, double SweepRecord::*field) {
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i - 1].n >= n0 && !(s[i].*field < s[i - 1].*field)) return false;
  return true;
}

Outcome criterion_7() {
  const auto t0 = Clock::now();
  const double eta = 0.8;
  const auto grid = log_spaced_grid(100, 100000000, 61);
  const auto all = sweep(eta, fig_exponents(), grid);
  bool ok = true;
  std::ostringstream os;

  const auto p56 = series(all, "-5/6");
  const auto& a8 = at_n(p56, 100000000);
  const auto& a5 = at_n(p56, 100000);
  const bool a_mono = decreasing_from(p56, 100000, &SweepRecord::normalized_eta_var) &&
                      decreasing_from(p56, 100000, &SweepRecord::normalized_phi_var);
  const bool a_range = a8.normalized_eta_var >= 1 && a8.normalized_eta_var <= 1.2 && a8.normalized_phi_var >= 1 &&
                       a8.normalized_phi_var <= 1.2;
  const bool a_closer = a8.normalized_eta_var - 1 < a5.normalized_eta_var - 1 &&
                        a8.normalized_phi_var - 1 < a5.normalized_phi_var - 1;
  ok &= a_mono && a_range && a_closer;
  os << "(a) p=-5/6 at 1e8: " << fmt("%.6f", a8.normalized_eta_var) << ", " << fmt("%.6f", a8.normalized_phi_var)
     << (a_mono && a_range && a_closer ? " ok" : " FAIL") << "; ";

  const auto p23 = series(all, "-2/3");
  bool b_grow = true;
  for (std::size_t i = 1; i < p23.size(); ++i)
    if (p23[i].n >= 10000) b_grow &= p23[i].normalized_eta_var > p23[i - 1].normalized_eta_var;
  const double b_ratio = at_n(p23, 100000000).normalized_eta_var / at_n(p23, 100000).normalized_eta_var;
  ok &= b_grow && b_ratio > 2.0;
  os << "(b) p=-2/3 eta var 1e5 -> 1e8 grows x" << fmt("%.3g", b_ratio) << (b_grow ? " ok" : " FAIL") << "; ";

  const double c34 = std::abs(at_n(series(all, "-3/4"), 100000000).normalized_phi_var - 1);
  const double c56 = std::abs(a8.normalized_phi_var - 1);
  ok &= c34 < c56;
  os << "(c) |phi-1| at 1e8: " << fmt("%.3g", c34) << " vs " << fmt("%.3g", c56) << (c34 < c56 ? " ok" : " FAIL")
     << "; ";

  double d_worst = 0.0;
  for (const auto& r : series(all, "inf"))
    d_worst = std::max(d_worst, std::abs(r.normalized_phi_var - 1 / (1 - eta * eta)));
  ok &= d_worst <= 1e-6;
  os << "(d) chi=0 phi flat, max dev " << fmt("%.3g", d_worst) << "; ";

  double e_min = INFINITY;
  for (const auto& r : all) e_min = std::min({e_min, r.normalized_eta_var, r.normalized_phi_var});
  ok &= e_min >= 1 - 1e-9;
  os << "(e) min emitted " << fmt("%.12f", e_min) << "; " << fmt("%.2f s", seconds_since(t0));
  return {ok, os.str()};
}

Outcome criterion_8() {
  const auto grid = log_spaced_grid(100, 100000000, 61);
  double worst = INFINITY;
  std::string where;
  for (double eta : {0.5, 0.8, 0.95}) {
    for (const auto& spec : fig_exponents()) {
      for (std::int64_t n : grid) {
        const auto config = std::isinf(spec.p) ? SqueezingConfig::from_chi(n, 0.0)
                                               : SqueezingConfig::from_exponent(n, spec.p);
        const auto report = evaluate_protocol(config, eta);
        const Eigen::Matrix2d gap = report.est_cov - fundamental_bound(n, eta);
        const double scale = report.est_cov.cwiseAbs().maxCoeff();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(gap);
        const double rel = es.eigenvalues().minCoeff() / scale;
        if (!(rel >= worst)) {
          worst = rel;
          where = "eta=" + fmt("%g", eta) + " p=" + spec.label + " N=" + std::to_string(n);
        }
      }
    }
  }
  return {worst >= -1e-12, "smallest eigenvalue / scale " + fmt("%.3g", worst) + " at " + where};
}

Outcome criterion_9() {
  const auto t0 = Clock::now();
  const auto r = oracle::mc_experiment(SqueezingConfig::from_chi(8, 0.2), ChannelParams(0.8, 0.05), 100000, 200, 42);
  const auto ratio = r.diagonal_ratio();
  const double z = r.off_diagonal_z();
  const double t = seconds_since(t0);
  const bool ok = std::abs(ratio[0] - 1) <= 0.1 && std::abs(ratio[1] - 1) <= 0.1 && std::abs(z) <= 3.0 &&
                  r.failed_experiments == 0 && t <= 600.0;
  std::ostringstream os;
  os << "seed 42, path " << r.path << ": Var ratio eta " << fmt("%.4f", ratio[0]) << " phi " << fmt("%.4f", ratio[1])
     << " (relative SE of each ~" << fmt("%.3f", std::sqrt(2.0 / 199)) << "), off-diagonal z " << fmt("%.2f", z)
     << " (predicted correlation "
     << fmt("%.3f", r.predicted_cov(0, 1) / std::sqrt(r.predicted_cov(0, 0) * r.predicted_cov(1, 1))) << ")"
     << ", failed " << r.failed_experiments << ", " << fmt("%.1f s", t);
  return {ok, os.str()};
}

Outcome criterion_10() {
  const auto grid = log_spaced_grid(1000000, 100000000, 21);
  bool ok = true;
  std::ostringstream os;
  for (double p : {-3.0 / 4.0, -5.0 / 6.0}) {
    const auto d = expansion_diagnostics(p, 0.8, grid);
    const bool pe = std::abs(d.fitted_eta_slope - d.predicted_eta_slope) <= 0.05;
    const bool pp = std::abs(d.fitted_phi_slope - d.predicted_phi_slope) <= 0.05;
    ok &= pe && pp;
    os << "p=" << fmt("%.4f", p) << ": eta " << fmt("%.4f", d.fitted_eta_slope) << " vs "
       << fmt("%.4f", d.predicted_eta_slope) << (pe ? "" : " FAIL") << ", phi " << fmt("%.4f", d.fitted_phi_slope)
       << " vs " << fmt("%.4f", d.predicted_phi_slope) << (pp ? "" : " FAIL") << "; ";
  }
  os << "fit over N in [1e6, 1e8]";
  return {ok, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 oracle equivalence of moment closed forms", criterion_1},
      {"2 channel algebra",
       [] {
         return from_checks(
             {"kraus_completeness", "dual_map_conjugation", "channel_output_elements", "channel_order_irrelevance"});
       }},
      {"3 single-qubit QFI", [] { return from_checks({"qfi_numeric_sld", "qfi_commutator_trace"}); }},
      {"4 structural zeros", criterion_4},
      {"5 Jacobian", criterion_5},
      {"6 epsilon optimality", [] { return from_checks({"epsilon_optimality"}); }},
      {"7 normalized variance curves at eta=0.8", criterion_7},
      {"8 bound dominance", criterion_8},
      {"9 Monte-Carlo estimator covariance", criterion_9},
      {"10 correction-order slopes", criterion_10},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %s [%.1f s]: %s\n", o.passed ? "PASS" : "FAIL", name, seconds_since(t0),
                o.detail.c_str());
    std::fflush(stdout);
    failures += o.passed ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
