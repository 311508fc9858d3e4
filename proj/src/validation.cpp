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

#include "twistsense/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "twistsense/oracle.hpp"

namespace twistsense {

namespace {

using oracle::OraclePath;

// Tracks the worst error seen by one named check.
class Tracker {
 public:
  Tracker(std::string name, double tolerance) : name_(std::move(name)), tolerance_(tolerance) {}

  void observe(double error, const std::string& where) {
    if (!(error <= worst_)) {
      worst_ = std::isnan(error) ? std::numeric_limits<double>::infinity() : error;
      where_ = where;
    }
  }

  CheckResult result() const {
    const bool ok = worst_ <= tolerance_;
    return {name_, ok, worst_, tolerance_, where_.empty() ? "" : "worst at " + where_};
  }

 private:
  std::string name_;
  double tolerance_;
  double worst_ = 0.0;
  std::string where_;
};

std::string at(std::int64_t n, double chi) {
  std::ostringstream os;
  os << "n=" << n << " chi=" << chi;
  return os.str();
}

std::vector<int> first_sites(std::size_t k) {
  std::vector<int> s(k);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

constexpr double kChis[] = {0.05, 0.3, 0.7};

void channel_checks(std::vector<CheckResult>& out) {
  Tracker completeness("kraus_completeness", tol::kCompleteness);
  Tracker dual("dual_map_conjugation", 1e-14);
  Tracker elements("channel_output_elements", 1e-14);
  oracle::Philox4x32 rng(7);
  for (int i = 0; i < 100; ++i) {
    const ChannelParams p(rng.uniform(), 2.0 * pi_v<double>() * rng.uniform());
    const auto k = kraus_ops(p);
    const Operator2 sum = k[0].adjoint() * k[0] + k[1].adjoint() * k[1];
    completeness.observe((sum - identity2()).cwiseAbs().maxCoeff(), "random params");
    for (Axis a : {Axis::X, Axis::Y, Axis::Z})
      dual.observe((dual_pauli(a, p).to_matrix() - dual_channel(pauli(a), p)).cwiseAbs().maxCoeff(), "random params");
    Operator2 rho;
    const double pz = rng.uniform();
    const Complex c = 0.5 * std::sqrt(pz * (1 - pz)) * std::polar(1.0, 2 * pi_v<double>() * rng.uniform());
    rho << pz, c, std::conj(c), 1 - pz;
    const Operator2 o = apply_channel(rho, p);
    const Complex expected = rho(0, 1) * p.eta() * std::polar(1.0, -p.phi());
    const double err = std::max({std::abs(o(0, 0) - rho(0, 0)), std::abs(o(1, 1) - rho(1, 1)),
                                 std::abs(o(0, 1) - expected), std::abs(o(1, 0) - std::conj(expected))});
    elements.observe(err, "random params");
  }
  out.push_back(completeness.result());
  out.push_back(dual.result());
  out.push_back(elements.result());

  Tracker qfi("qfi_numeric_sld", 1e-9);
  Tracker comm("qfi_commutator_trace", 1e-12);
  for (double eta : {0.2, 0.5, 0.6, 0.8}) {
    for (double phi : {0.0, 0.7, 2.9}) {
      const ChannelParams p(eta, phi);
      const auto rep = single_qubit_qfi(p);
      const Operator2 rho = plus_state_output(p);
      const Operator2 le = solve_sld(rho, plus_state_output_d_eta(p));
      const Operator2 lp = solve_sld(rho, plus_state_output_d_phi(p));
      Eigen::Matrix2d f;
      f(0, 0) = (rho * le * le).trace().real();
      f(1, 1) = (rho * lp * lp).trace().real();
      f(0, 1) = f(1, 0) = (rho * (le * lp + lp * le) / 2.0).trace().real();
      Eigen::Matrix2d expected = Eigen::Matrix2d::Zero();
      expected(0, 0) = 1.0 / (1.0 - eta * eta);
      expected(1, 1) = eta * eta;
      std::ostringstream where;
      where << "eta=" << eta << " phi=" << phi;
      qfi.observe((f - expected).cwiseAbs().maxCoeff(), where.str());
      qfi.observe((rep.f_matrix - expected).cwiseAbs().maxCoeff(), where.str());
      comm.observe(rep.commutator_trace, where.str());
    }
  }
  out.push_back(qfi.result());
  out.push_back(comm.result());
}

void moment_checks(const ValidationOptions& opt, std::vector<CheckResult>& out) {
  Tracker oat("oat_closed_forms", opt.tol);
  Tracker roat("roat_closed_forms", opt.tol);
  Tracker odd("odd_yz_zeros", 1e-12);
  for (int n = 4; n <= opt.n_max; ++n) {
    for (double chi : kChis) {
      const auto config = SqueezingConfig::from_chi(n, chi);
      const auto oat_state = oracle::build_oat_state(n, chi);
      const auto roat_state = oracle::build_roat_state(n, chi);
      const auto roat_table = roat_moments(config);
      for (const auto& w : all_words(4)) {
        double closed = oat_moment(w, n, chi);
        if (auto it = opt.moment_perturbation.find(w.str()); it != opt.moment_perturbation.end()) closed += it->second;
        const auto sites = first_sites(w.size());
        const std::string where = at(n, chi) + " word=" + w.str();
        oat.observe(std::abs(closed - oracle::exact_moment(oat_state, w, sites)), where);
        const double exact_roat = oracle::exact_moment(roat_state, w, sites);
        roat.observe(std::abs(roat_table.at(w) - exact_roat), where);
        if (w.odd_yz()) odd.observe(std::abs(exact_roat), where);
      }
    }
  }
  out.push_back(oat.result());
  out.push_back(roat.result());
  out.push_back(odd.result());

  Tracker perm("permutation_invariance", 1e-12);
  oracle::Philox4x32 rng(11);
  const int n = std::min(6, opt.n_max);
  const auto state = oracle::build_roat_state(n, 0.2);
  for (const auto& w : all_words(4)) {
    const double ref = oracle::exact_moment(state, w, first_sites(w.size()));
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<int> sites(static_cast<std::size_t>(n));
      std::iota(sites.begin(), sites.end(), 0);
      for (std::size_t i = sites.size() - 1; i > 0; --i)
        std::swap(sites[i], sites[static_cast<std::size_t>(rng() % (i + 1))]);
      sites.resize(w.size());
      perm.observe(std::abs(oracle::exact_moment(state, w, sites) - ref), "word=" + w.str());
    }
  }
  out.push_back(perm.result());
}

void density_checks(const ValidationOptions& opt, std::vector<CheckResult>& out) {
  const int n_top = std::min(opt.n_max, opt.density_n_cap);
  Tracker outputs("output_moments", opt.tol);
  Tracker order("channel_order_irrelevance", 1e-13);
  for (int n = 4; n <= std::min(n_top, 8); ++n) {
    for (double chi : {0.3, 0.7}) {
      const ChannelParams params(0.8, 0.5);
      const auto config = SqueezingConfig::from_chi(n, chi);
      const auto state = oracle::build_roat_state(n, chi);
      const auto rho = oracle::evolve_density(state, params);
      const auto rho_swapped = oracle::evolve_density(state, params, oracle::KrausOrder::RotationBeforeDephasing);
      order.observe((rho.density() - rho_swapped.density()).cwiseAbs().maxCoeff(), at(n, chi));
      const auto table = output_moments(roat_moments(config), params);
      for (const auto& w : all_words(4))
        outputs.observe(std::abs(table.at(w) - oracle::exact_moment(rho, w, first_sites(w.size()))),
                        at(n, chi) + " word=" + w.str());
    }
  }
  out.push_back(outputs.result());
  out.push_back(order.result());

  Tracker stats("collective_stats", 1e-9);
  Tracker cov("cov_j2_jy_zero_at_phi0", 1e-10);
  Tracker phi_free("j2_phi_independence", 1e-10);
  Tracker noiseless("var_j2_zero_at_eta1", 1e-8);
  Tracker jac("jacobian_finite_difference", 1e-6);
  Tracker sector("joint_distribution_support", 1e-12);
  for (int n = 4; n <= n_top; ++n) {
    const double chi = 0.3;
    const auto config = SqueezingConfig::from_chi(n, chi);
    const ChannelParams params(0.8, 0.0);
    const auto dist = oracle::output_distribution(config, params, OraclePath::Density);
    const auto s = oracle::stats_of(dist);
    const auto closed = observable_covariance(config, params);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
    const std::string where = at(n, chi);
    stats.observe(rel(closed.mean_j2, s.mean_j2), where + " mean_j2");
    stats.observe(rel(closed.mean_jy, s.mean_jy), where + " mean_jy");
    stats.observe(rel(closed.var_jy, s.var_jy), where + " var_jy");
    stats.observe(rel(closed.var_j2, s.var_j2), where + " var_j2");
    cov.observe(std::abs(s.cov_j2_jy), where);
    for (const auto& o : dist.outcomes)
      if (std::abs(o.two_m) > o.two_j) sector.observe(o.probability, where);

    for (double phi : {0.3, 1.1, 2.7}) {
      const auto d = oracle::output_distribution(config, ChannelParams(0.8, phi), OraclePath::Density);
      phi_free.observe(std::abs(d.mean_j2() - s.mean_j2), where);
    }
    const auto ideal = oracle::stats_of(oracle::output_distribution(config, ChannelParams(1.0, 0.0), OraclePath::Density));
    noiseless.observe(std::abs(ideal.var_j2), where);

    const Eigen::Matrix2d fd = oracle::finite_difference_jacobian(config, params);
    jac.observe((fd - closed.jacobian).cwiseAbs().maxCoeff(), where);
  }
  for (auto* t : {&stats, &cov, &phi_free, &noiseless, &jac, &sector}) out.push_back(t->result());

  Tracker traj("trajectory_vs_density", 1e-10);
  {
    const int n = std::min(6, n_top);
    const auto config = SqueezingConfig::from_chi(n, 0.2);
    const ChannelParams params(0.7, 0.4);
    const auto a = oracle::output_distribution(config, params, OraclePath::Density);
    const auto b = oracle::output_distribution(config, params, OraclePath::Trajectory);
    std::map<std::pair<int, int>, double> diff;
    for (const auto& o : a.outcomes) diff[{o.two_j, o.two_m}] += o.probability;
    for (const auto& o : b.outcomes) diff[{o.two_j, o.two_m}] -= o.probability;
    for (const auto& [key, d] : diff) traj.observe(std::abs(d), at(n, 0.2));
  }
  out.push_back(traj.result());
}

void epsilon_checks(const ValidationOptions& opt, std::vector<CheckResult>& out) {
  Tracker eps("epsilon_optimality", 1e-6);
  for (int n = 4; n <= std::min(opt.n_max, 10); ++n) {
    for (double chi : {0.05, 0.3}) {
      const auto scan = oracle::brute_force_epsilon(n, chi);
      eps.observe(oracle::angular_distance(scan.epsilon, epsilon_angle(n, chi), pi_v<double>()), at(n, chi));
    }
  }
  out.push_back(eps.result());
}

void basis_checks(std::vector<CheckResult>& out) {
  const auto& basis = oracle::cached_joint_basis(4);
  const auto mult = basis.multiplicities();
  const bool ok = mult.size() == 3 && mult.at(4) == 1 && mult.at(2) == 3 && mult.at(0) == 2;
  out.push_back({"joint_basis_multiplicities", ok, ok ? 0.0 : 1.0, 0.0, "n=4 expects {j=2:1, j=1:3, j=0:2}"});
}

}  // namespace

bool ValidationSummary::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<std::string> ValidationSummary::failed_names() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.passed) out.push_back(c.name);
  return out;
}

nlohmann::json ValidationSummary::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : checks) {
    list.push_back({{"name", c.name},
                    {"passed", c.passed},
                    {"max_error", std::isfinite(c.max_error) ? nlohmann::json(c.max_error) : nlohmann::json(nullptr)},
                    {"tolerance", c.tolerance},
                    {"detail", c.detail}});
  }
  return {{"version", kVersion}, {"passed", passed()}, {"failed", failed_names()}, {"checks", list}};
}

ValidationSummary run_validation(const ValidationOptions& options) {
  if (options.n_max < 4 || options.n_max > oracle::kMaxDensityQubits)
    throw InvalidRequest("n_max must lie in [4, 12]");
  if (!(options.tol > 0.0)) throw InvalidRequest("tol must be positive");
  ValidationSummary summary;
  channel_checks(summary.checks);
  moment_checks(options, summary.checks);
  density_checks(options, summary.checks);
  epsilon_checks(options, summary.checks);
  basis_checks(summary.checks);
  return summary;
}

}  // namespace twistsense
