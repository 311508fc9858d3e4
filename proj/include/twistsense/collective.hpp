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

// First- through fourth-order collective angular momentum statistics of the
// output state, expressed through permutation-invariant Pauli moments.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "twistsense/moments.hpp"

namespace twistsense {

struct ObservableStats {
  double mean_jy = 0.0;
  double mean_j2 = 0.0;
  double var_jy = 0.0;
  double var_j2 = 0.0;
  double cov_j2_jy = 0.0;
  // Rows (<J^2>, <J_y>), columns (eta, phi).
  Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero();
  std::vector<std::string> warnings;

  /// Sigma(J^2, J_y) in the order (J^2, J_y).
  Eigen::Matrix2d covariance() const;
};

double mean_jy(const SqueezingConfig& config, const ChannelParams& params);
double mean_j2(const SqueezingConfig& config, const ChannelParams& params);

/// Var(J_y) at the phi = 0 operating point.
double var_jy(const SqueezingConfig& config, const ChannelParams& params);

/// Cov(J_i^2, J_j^2), symmetrized for i != j. Valid at any phi.
double fourth_moment_combinatorics(Axis i, Axis j, const SqueezingConfig& config, const ChannelParams& params,
                                   Precision precision = Precision::Auto);

/// Var(J^2) = sum_{i,j} Cov(J_i^2, J_j^2).
double var_j2(const SqueezingConfig& config, const ChannelParams& params, Precision precision = Precision::Auto);

/// Sigma(J^2, J_y) and the analytic Jacobian at phi = 0.
ObservableStats observable_covariance(const SqueezingConfig& config, const ChannelParams& params,
                                      Precision precision = Precision::Auto);

/// Resolves Precision::Auto by particle count.
bool uses_extended(std::int64_t n, Precision precision);

/// One class of coinciding site indices in sum_{klmn} <s_i^k s_i^l s_j^m s_j^n>.
struct IndexClass {
  std::string description;
  long double count;
};

/// Occurrence counts of index-coincidence classes; they partition N^4.
std::vector<IndexClass> index_class_counts(std::int64_t n, bool same_axis);

namespace detail {

template <class Real>
const Real& word_value(const BasicMomentTable<Real>& t, std::initializer_list<Axis> axes) {
  return t.at(PauliWord(axes.begin(), axes.end()));
}

/// Collected-by-powers-of-N form of Cov(J_i^2, J_j^2) on a permutation-invariant
/// state whose moments are in `out`. 4-site moments are only read when N >= 4
/// (their coefficient N(N-1)(N-2)(N-3) vanishes otherwise).
template <class Real>
Real cov_squares(Axis i, Axis j, const BasicMomentTable<Real>& out) {
  const std::int64_t n_int = out.config().n();
  const Real n(n_int);
  const Real n2 = n * n;
  const Real n3 = n2 * n;
  const Real n4 = n3 * n;
  auto four = [&](std::initializer_list<Axis> a) { return n_int >= 4 ? word_value(out, a) : Real(0); };

  if (i == j) {
    const Real m2 = word_value(out, {i, i});
    const Real m4 = four({i, i, i, i});
    const Real gap = m4 - m2 * m2;
    const Real acc = n4 * gap + n3 * (4 * m2 - 4 * m2 * m2 - 6 * gap) + n2 * (2 - 12 * m2 + 10 * m2 * m2 + 11 * gap) +
                     n * (-2 + 8 * m2 - 6 * m2 * m2 - 6 * gap);
    return acc / 16;
  }
  const Axis k = static_cast<Axis>(3 - static_cast<int>(i) - static_cast<int>(j));
  const Real mi = word_value(out, {i, i});
  const Real mj = word_value(out, {j, j});
  const Real mk = word_value(out, {k, k});
  const Real m4 = four({i, i, j, j});
  const Real gap = m4 - mi * mj;
  const Real acc = n4 * gap + n3 * (-4 * mi * mj - 6 * gap) + n2 * (-2 * mk + 10 * mi * mj + 11 * gap) +
                   n * (2 * mk - 6 * mi * mj - 6 * gap);
  return acc / 16;
}

template <class Real>
struct ExactStats {
  Real mean_jy;
  Real mean_j2;
  Real var_jy;
  Real var_j2;
  Real d_j2_d_eta;
  Real d_jy_d_phi;
  Real sigma_x;
};

/// All phi = 0 quantities from the ROAT table, in precision Real.
template <class Real>
ExactStats<Real> exact_stats(const SqueezingConfig& config, const ChannelParams& params, const Real& chi) {
  const auto roat = roat_moments_t<Real>(config, chi);
  const auto out = output_moments_t<Real>(roat, params);
  const Real n(config.n());
  const Real eta(params.eta());
  const Real xx = word_value(roat, {Axis::X, Axis::X});
  const Real yy = word_value(roat, {Axis::Y, Axis::Y});

  ExactStats<Real> s;
  s.sigma_x = word_value(roat, {Axis::X});
  s.mean_jy = n / 2 * word_value(out, {Axis::Y});
  Real sum_pairs(0);
  for (Axis a : {Axis::X, Axis::Y, Axis::Z}) sum_pairs += word_value(out, {a, a});
  s.mean_j2 = 3 * n / 4 + n * (n - 1) / 4 * sum_pairs;
  s.var_jy = (n + eta * eta * n * (n - 1) * yy) / 4;
  Real v(0);
  for (Axis a : {Axis::X, Axis::Y, Axis::Z})
    for (Axis b : {Axis::X, Axis::Y, Axis::Z}) v += cov_squares<Real>(a, b, out);
  s.var_j2 = v;
  s.d_j2_d_eta = n * (n - 1) / 2 * eta * (xx + yy);
  s.d_jy_d_phi = n * eta / 2 * s.sigma_x;
  return s;
}

}  // namespace detail

}  // namespace twistsense
