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

#include "twistsense/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>

namespace twistsense::oracle {

namespace {

using Eigen::Matrix2cd;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

constexpr Complex kI{0.0, 1.0};
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_qubits(int n, int max, const char* what) {
  if (n < 1 || n > max)
    throw InvalidRequest(std::string(what) + ": n must lie in [1, " + std::to_string(max) + "], got " +
                         std::to_string(n));
}

int qubits_of(Eigen::Index dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0) throw InvalidRequest("state dimension is not a power of two");
  return std::countr_zero(static_cast<std::uint64_t>(dim));
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Phase picked up by basis state with bit value `bit` under sigma_axis.
Complex pauli_phase(Axis axis, bool bit) {
  switch (axis) {
    case Axis::X: return 1.0;
    case Axis::Y: return bit ? -kI : kI;
    case Axis::Z: return bit ? -1.0 : 1.0;
  }
  return 1.0;
}

// Spin-j operators on Dicke states |a>, a = number of 1 bits, m = j - a.
std::array<MatrixXcd, 3> spin_matrices(int two_j) {
  const int d = two_j + 1;
  const double j = two_j / 2.0;
  MatrixXcd jp = MatrixXcd::Zero(d, d);
  MatrixXcd jz = MatrixXcd::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    const double m = j - a;
    jz(a, a) = m;
    if (a > 0) jp(a - 1, a) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  const MatrixXcd jm = jp.adjoint();
  return {(jp + jm) / 2.0, (jp - jm) / (2.0 * kI), jz};
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

int label_two_j(double lambda) {
  const int two_j = static_cast<int>(std::lround(-1.0 + std::sqrt(1.0 + 4.0 * std::max(lambda, 0.0))));
  if (std::abs(lambda - two_j * (two_j + 2) / 4.0) > tol::kEigenCluster)
    throw NumericalError("J^2 eigenvalue " + std::to_string(lambda) + " is not of the form j(j+1)");
  return two_j;
}

JointDistribution finalize(int n, const std::map<std::pair<int, int>, double>& acc) {
  JointDistribution dist;
  dist.n = n;
  for (const auto& [key, p] : acc) {
    if (p < -tol::kProbabilityClamp)
      throw NumericalError("negative outcome probability " + std::to_string(p));
    dist.outcomes.push_back({key.first, key.second, std::max(p, 0.0)});
  }
  if (std::abs(dist.total() - 1.0) > 1e-10)
    throw NumericalError("joint distribution sums to " + std::to_string(dist.total()));
  return dist;
}

Eigen::Vector2d oracle_means(const SqueezingConfig& config, const ChannelParams& params, OraclePath path) {
  const auto dist = output_distribution(config, params, path);
  return {dist.mean_j2(), dist.mean_jy()};
}

}  // namespace

DenseState DenseState::pure(VectorXcd amplitudes) {
  const int n = qubits_of(amplitudes.size());
  if (std::abs(amplitudes.norm() - 1.0) > 1e-12)
    throw InvalidRequest("pure state norm deviates from 1 by " + std::to_string(amplitudes.norm() - 1.0));
  return DenseState(n, std::move(amplitudes));
}

DenseState DenseState::mixed(MatrixXcd rho, bool full_check) {
  if (rho.rows() != rho.cols()) throw InvalidRequest("density matrix must be square");
  const int n = qubits_of(rho.rows());
  const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw InvalidRequest("density matrix is not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0)) > 1e-12) throw InvalidRequest("density matrix trace deviates from 1");
  if (rho.diagonal().real().minCoeff() < -1e-10) throw InvalidRequest("density matrix has a negative diagonal entry");
  if (full_check) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) throw InvalidRequest("density matrix has a negative eigenvalue");
  }
  return DenseState(n, std::move(rho));
}

const VectorXcd& DenseState::amplitudes() const {
  if (!is_pure()) throw InvalidRequest("state is mixed");
  return std::get<VectorXcd>(data_);
}

const MatrixXcd& DenseState::density() const {
  if (is_pure()) throw InvalidRequest("state is pure; use to_density()");
  return std::get<MatrixXcd>(data_);
}

MatrixXcd DenseState::to_density() const {
  if (is_pure()) {
    const auto& psi = amplitudes();
    return psi * psi.adjoint();
  }
  return density();
}

VectorXcd plus_state(int n) {
  check_qubits(n, kMaxTrajectoryQubits, "plus_state");
  const Eigen::Index dim = Eigen::Index{1} << n;
  return VectorXcd::Constant(dim, Complex(std::pow(2.0, -n / 2.0)));
}

DenseState build_oat_state(int n, double chi) {
  VectorXcd psi = plus_state(n);
  for (Eigen::Index a = 0; a < psi.size(); ++a) {
    const double m = (n - 2.0 * std::popcount(static_cast<std::uint64_t>(a))) / 2.0;
    psi[a] *= std::exp(-kI * chi * m * m);
  }
  return DenseState::pure(std::move(psi));
}

DenseState build_rotated_oat_state(int n, double chi, double theta) {
  VectorXcd psi = build_oat_state(n, chi).amplitudes();
  // e^{i theta sigma_x / 2}
  Matrix2cd r;
  r << std::cos(theta / 2), kI * std::sin(theta / 2), kI * std::sin(theta / 2), std::cos(theta / 2);
  apply_sitewise(psi, r);
  return DenseState::pure(std::move(psi));
}

DenseState build_roat_state(int n, double chi) {
  const auto config = SqueezingConfig::from_chi(n, chi);
  return build_rotated_oat_state(n, chi, config.epsilon() + pi_v<double>() / 2);
}

void apply_sitewise(VectorXcd& psi, const Matrix2cd& a) {
  const int n = qubits_of(psi.size());
  for (int s = 0; s < n; ++s) {
    const Eigen::Index bit = Eigen::Index{1} << s;
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      if (i & bit) continue;
      const Complex x0 = psi[i];
      const Complex x1 = psi[i | bit];
      psi[i] = a(0, 0) * x0 + a(0, 1) * x1;
      psi[i | bit] = a(1, 0) * x0 + a(1, 1) * x1;
    }
  }
}

void conjugate_sitewise(MatrixXcd& rho, const Matrix2cd& a) {
  const int n = qubits_of(rho.rows());
  for (Eigen::Index c = 0; c < rho.cols(); ++c) {
    VectorXcd col = rho.col(c);
    apply_sitewise(col, a);
    rho.col(c) = col;
  }
  const Matrix2cd ac = a.conjugate();
  for (int s = 0; s < n; ++s) {
    const Eigen::Index bit = Eigen::Index{1} << s;
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
      if (c & bit) continue;
      const VectorXcd c0 = rho.col(c);
      const VectorXcd c1 = rho.col(c | bit);
      rho.col(c) = ac(0, 0) * c0 + ac(0, 1) * c1;
      rho.col(c | bit) = ac(1, 0) * c0 + ac(1, 1) * c1;
    }
  }
}

DenseState evolve_density(const DenseState& state, const ChannelParams& params, KrausOrder order) {
  check_qubits(state.n(), kMaxDensityQubits, "evolve_density");
  const auto dephase = kraus_ops(ChannelParams(params.eta(), 0.0));
  Matrix2cd u = Matrix2cd::Zero();
  u(0, 0) = std::exp(-kI * params.phi() / 2.0);
  u(1, 1) = std::exp(kI * params.phi() / 2.0);
  std::array<Matrix2cd, 2> k;
  for (int i = 0; i < 2; ++i)
    k[i] = order == KrausOrder::RotationAfterDephasing ? Matrix2cd(u * dephase[i]) : Matrix2cd(dephase[i] * u);

  MatrixXcd rho = state.to_density();
  const Eigen::Index dim = rho.rows();
  for (int s = 0; s < state.n(); ++s) {
    const Eigen::Index bit = Eigen::Index{1} << s;
    for (Eigen::Index c = 0; c < dim; ++c) {
      if (c & bit) continue;
      for (Eigen::Index r = 0; r < dim; ++r) {
        if (r & bit) continue;
        Matrix2cd b;
        b << rho(r, c), rho(r, c | bit), rho(r | bit, c), rho(r | bit, c | bit);
        const Matrix2cd out = k[0] * b * k[0].adjoint() + k[1] * b * k[1].adjoint();
        rho(r, c) = out(0, 0);
        rho(r, c | bit) = out(0, 1);
        rho(r | bit, c) = out(1, 0);
        rho(r | bit, c | bit) = out(1, 1);
      }
    }
  }
  if (std::abs(rho.trace() - Complex(1.0)) > 1e-12) throw NumericalError("channel evolution lost trace");
  return DenseState::mixed(std::move(rho));
}

double exact_moment(const DenseState& state, const PauliWord& word, const std::vector<int>& sites) {
  if (sites.size() != word.size()) throw InvalidRequest("exact_moment: one site per Pauli label required");
  std::uint64_t mask = 0;
  std::uint64_t used = 0;
  for (int s : sites) {
    if (s < 0 || s >= state.n()) throw InvalidRequest("exact_moment: site index out of range");
    if (used & (std::uint64_t{1} << s)) throw InvalidRequest("exact_moment: repeated site index");
    used |= std::uint64_t{1} << s;
  }
  for (std::size_t k = 0; k < word.size(); ++k)
    if (word[k] != Axis::Z) mask |= std::uint64_t{1} << sites[k];

  auto phase = [&](std::uint64_t a) {
    Complex p = 1.0;
    for (std::size_t k = 0; k < word.size(); ++k) p *= pauli_phase(word[k], (a >> sites[k]) & 1u);
    return p;
  };
  Complex total = 0.0;
  if (state.is_pure()) {
    const auto& psi = state.amplitudes();
    for (Eigen::Index a = 0; a < psi.size(); ++a) {
      const auto ua = static_cast<std::uint64_t>(a);
      total += std::conj(psi[static_cast<Eigen::Index>(ua ^ mask)]) * phase(ua) * psi[a];
    }
  } else {
    const auto& rho = state.density();
    for (Eigen::Index a = 0; a < rho.rows(); ++a) {
      const auto ua = static_cast<std::uint64_t>(a);
      total += phase(ua) * rho(a, static_cast<Eigen::Index>(ua ^ mask));
    }
  }
  return total.real();
}

VectorXcd apply_collective(Axis axis, const VectorXcd& psi) {
  const int n = qubits_of(psi.size());
  VectorXcd out = VectorXcd::Zero(psi.size());
  for (int s = 0; s < n; ++s) {
    const Eigen::Index bit = Eigen::Index{1} << s;
    for (Eigen::Index a = 0; a < psi.size(); ++a) {
      const Complex v = 0.5 * pauli_phase(axis, a & bit) * psi[a];
      out[axis == Axis::Z ? a : (a ^ bit)] += v;
    }
  }
  return out;
}

MatrixXcd dense_collective(int n, Axis axis) {
  check_qubits(n, 10, "dense_collective");
  const Eigen::Index dim = Eigen::Index{1} << n;
  MatrixXcd m(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) m.col(c) = apply_collective(axis, VectorXcd::Unit(dim, c));
  return m;
}

MatrixXcd dense_total_j2(int n) {
  MatrixXcd total = MatrixXcd::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
  for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
    const MatrixXcd j = dense_collective(n, a);
    total += j * j;
  }
  return total;
}

Matrix2cd y_basis_map() {
  Matrix2cd w;
  w << 1.0, 1.0, kI, -kI;
  return w / std::sqrt(2.0);
}

std::map<int, int> JointBasis::multiplicities() const {
  // Copies of irrep j = number of highest-weight vectors, i.e. labels with 2m = 2j.
  std::map<int, int> out;
  for (const auto& b : blocks)
    for (int tj : b.two_j)
      if (tj == b.two_m) ++out[tj];
  return out;
}

JointBasis joint_measurement_basis(int n) {
  check_qubits(n, kMaxDensityQubits, "joint_measurement_basis");
  const std::uint32_t dim = 1u << n;
  std::vector<std::int64_t> position(dim, -1);
  JointBasis basis{n, {}, 0.0};
  const double offset = (3.0 * n - n * (n - 1.0)) / 4.0;

  for (int ones = 0; ones <= n; ++ones) {
    JointBasisBlock block{n - 2 * ones, {}, {}, {}};
    for (std::uint32_t a = 0; a < dim; ++a)
      if (std::popcount(a) == ones) {
        position[a] = static_cast<std::int64_t>(block.indices.size());
        block.indices.push_back(a);
      }
    const auto d = static_cast<Eigen::Index>(block.indices.size());
    // J^2 = (3n - n(n-1))/4 + sum_{s<t} SWAP_st
    MatrixXd h = MatrixXd::Identity(d, d) * offset;
    for (Eigen::Index col = 0; col < d; ++col) {
      const std::uint32_t a = block.indices[static_cast<std::size_t>(col)];
      for (int s = 0; s < n; ++s)
        for (int t = s + 1; t < n; ++t) {
          const std::uint32_t bs = (a >> s) & 1u, bt = (a >> t) & 1u;
          const std::uint32_t b = bs == bt ? a : (a ^ (1u << s) ^ (1u << t));
          h(position[b], col) += 1.0;
        }
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("J^2 block diagonalization failed");
    block.vectors = es.eigenvectors();
    for (Eigen::Index k = 0; k < d; ++k) {
      const int two_j = label_two_j(es.eigenvalues()[k]);
      if ((two_j - n) % 2 != 0 || two_j < std::abs(block.two_m) || two_j > n)
        throw NumericalError("inconsistent (j, m) label in joint basis");
      const double label = two_j * (two_j + 2) / 4.0;
      const double residual = (h * block.vectors.col(k) - label * block.vectors.col(k)).norm();
      if (residual > tol::kDegeneracyResidual)
        throw NumericalError("joint basis residual " + std::to_string(residual) + " exceeds tolerance");
      basis.max_residual = std::max(basis.max_residual, residual);
      block.two_j.push_back(two_j);
    }
    for (auto idx : block.indices) position[idx] = -1;
    basis.blocks.push_back(std::move(block));
  }
  return basis;
}

const JointBasis& cached_joint_basis(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<JointBasis>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<JointBasis>(joint_measurement_basis(n));
  return *slot;
}

double JointDistribution::total() const {
  double s = 0.0;
  for (const auto& o : outcomes) s += o.probability;
  return s;
}

double JointDistribution::mean_j2() const {
  double s = 0.0;
  for (const auto& o : outcomes) s += o.probability * o.j2();
  return s;
}

double JointDistribution::mean_jy() const {
  double s = 0.0;
  for (const auto& o : outcomes) s += o.probability * o.m();
  return s;
}

JointDistribution joint_distribution(const DenseState& state, const JointBasis& basis) {
  if (state.n() != basis.n) throw InvalidRequest("joint_distribution: state and basis sizes differ");
  const Matrix2cd w_dag = y_basis_map().adjoint();
  std::map<std::pair<int, int>, double> acc;
  if (state.is_pure()) {
    VectorXcd psi = state.amplitudes();
    apply_sitewise(psi, w_dag);
    for (const auto& b : basis.blocks) {
      VectorXcd local(static_cast<Eigen::Index>(b.indices.size()));
      for (std::size_t i = 0; i < b.indices.size(); ++i) local[static_cast<Eigen::Index>(i)] = psi[b.indices[i]];
      const VectorXcd amp = b.vectors.transpose().cast<Complex>() * local;
      for (Eigen::Index k = 0; k < amp.size(); ++k)
        acc[{b.two_j[static_cast<std::size_t>(k)], b.two_m}] += std::norm(amp[k]);
    }
  } else {
    MatrixXcd rho = state.density();
    conjugate_sitewise(rho, w_dag);
    for (const auto& b : basis.blocks) {
      const auto d = static_cast<Eigen::Index>(b.indices.size());
      MatrixXcd local(d, d);
      for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index r = 0; r < d; ++r)
          local(r, c) = rho(b.indices[static_cast<std::size_t>(r)], b.indices[static_cast<std::size_t>(c)]);
      const MatrixXcd mv = local * b.vectors.cast<Complex>();
      for (Eigen::Index k = 0; k < d; ++k) {
        const double p = (b.vectors.col(k).cast<Complex>().transpose() * mv.col(k))(0, 0).real();
        acc[{b.two_j[static_cast<std::size_t>(k)], b.two_m}] += p;
      }
    }
  }
  return finalize(state.n(), acc);
}

std::vector<JointDistribution> flip_count_distributions(const SqueezingConfig& config, double phi) {
  const int n = static_cast<int>(config.n());
  check_qubits(n, kMaxTrajectoryQubits, "flip_count_distributions");
  const VectorXcd roat = build_roat_state(n, config.chi()).amplitudes();
  // Dicke amplitudes of the symmetric ROAT state, indexed by the number of 1 bits.
  std::vector<Complex> dicke(static_cast<std::size_t>(n) + 1);
  for (int w = 0; w <= n; ++w)
    dicke[static_cast<std::size_t>(w)] = roat[(Eigen::Index{1} << w) - 1] * std::sqrt(binomial(n, w));

  std::vector<JointDistribution> out;
  for (int k = 0; k <= n; ++k) {
    const int da = k + 1, db = n - k + 1;
    const auto sa = spin_matrices(k);
    const auto sb = spin_matrices(n - k);
    const MatrixXcd ia = MatrixXcd::Identity(da, da), ib = MatrixXcd::Identity(db, db);
    std::array<MatrixXcd, 3> j;
    for (int ax = 0; ax < 3; ++ax) j[ax] = kron(sa[ax], ib) + kron(ia, sb[ax]);
    const MatrixXcd j2 = j[0] * j[0] + j[1] * j[1] + j[2] * j[2];

    VectorXcd psi(da * db);
    for (int a = 0; a < da; ++a)
      for (int b = 0; b < db; ++b) {
        const int w = a + b;
        const double cg = std::sqrt(binomial(k, a) * binomial(n - k, b) / binomial(n, w));
        const double sign = (a % 2 == 0) ? 1.0 : -1.0;
        psi[a * db + b] = dicke[static_cast<std::size_t>(w)] * cg * sign * std::exp(-kI * phi * (n - 2.0 * w) / 2.0);
      }

    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(j2);
    const auto& lambda = es.eigenvalues();
    std::map<std::pair<int, int>, double> acc;
    Eigen::Index start = 0;
    while (start < lambda.size()) {
      Eigen::Index stop = start + 1;
      while (stop < lambda.size() && lambda[stop] - lambda[start] <= tol::kEigenCluster) ++stop;
      const int two_j = label_two_j(lambda[start]);
      const double label = two_j * (two_j + 2) / 4.0;
      const MatrixXcd q = es.eigenvectors().middleCols(start, stop - start);
      Eigen::SelfAdjointEigenSolver<MatrixXcd> ey(q.adjoint() * j[1] * q);
      for (Eigen::Index c = 0; c < ey.eigenvalues().size(); ++c) {
        const double m = ey.eigenvalues()[c];
        const int two_m = static_cast<int>(std::lround(2.0 * m));
        const VectorXcd u = q * ey.eigenvectors().col(c);
        const double residual =
            std::max((j2 * u - label * u).norm(), (j[1] * u - (two_m / 2.0) * u).norm());
        if (residual > tol::kDegeneracyResidual)
          throw NumericalError("two-block joint eigenvector residual " + std::to_string(residual));
        acc[{two_j, two_m}] += std::norm(u.dot(psi));
      }
      start = stop;
    }
    out.push_back(finalize(n, acc));
  }
  return out;
}

JointDistribution trajectory_distribution(const SqueezingConfig& config, const ChannelParams& params) {
  const int n = static_cast<int>(config.n());
  const auto per_k = flip_count_distributions(config, params.phi());
  const double q = (1.0 - params.eta()) / 2.0;
  std::map<std::pair<int, int>, double> acc;
  for (int k = 0; k <= n; ++k) {
    const double weight = binomial(n, k) * std::pow(q, k) * std::pow(1.0 - q, n - k);
    for (const auto& o : per_k[static_cast<std::size_t>(k)].outcomes) acc[{o.two_j, o.two_m}] += weight * o.probability;
  }
  return finalize(n, acc);
}

JointDistribution output_distribution(const SqueezingConfig& config, const ChannelParams& params, OraclePath path) {
  const int n = static_cast<int>(config.n());
  if (path == OraclePath::Auto) path = n <= kMaxDensityQubits ? OraclePath::Density : OraclePath::Trajectory;
  if (path == OraclePath::Trajectory) {
    check_qubits(n, kMaxTrajectoryQubits, "trajectory path");
    return trajectory_distribution(config, params);
  }
  check_qubits(n, kMaxDensityQubits, "density path");
  const auto rho = evolve_density(build_roat_state(n, config.chi()), params);
  return joint_distribution(rho, cached_joint_basis(n));
}

Eigen::Matrix2d OracleStats::covariance() const {
  Eigen::Matrix2d m;
  m << var_j2, cov_j2_jy, cov_j2_jy, var_jy;
  return m;
}

OracleStats stats_of(const JointDistribution& dist) {
  OracleStats s{dist.mean_j2(), dist.mean_jy(), 0.0, 0.0, 0.0};
  for (const auto& o : dist.outcomes) {
    const double dj = o.j2() - s.mean_j2;
    const double dm = o.m() - s.mean_jy;
    s.var_j2 += o.probability * dj * dj;
    s.var_jy += o.probability * dm * dm;
    s.cov_j2_jy += o.probability * dj * dm;
  }
  return s;
}

Eigen::Matrix2d finite_difference_jacobian(const SqueezingConfig& config, const ChannelParams& params, double step,
                                           OraclePath path) {
  const double eta = params.eta();
  const double phi = params.phi();
  Eigen::Matrix2d d;
  const double lo = std::max(0.0, eta - step);
  const double hi = std::min(1.0, eta + step);
  d.col(0) = (oracle_means(config, ChannelParams(hi, phi), path) - oracle_means(config, ChannelParams(lo, phi), path)) /
             (hi - lo);
  d.col(1) = (oracle_means(config, ChannelParams(eta, phi + step), path) -
              oracle_means(config, ChannelParams(eta, phi - step), path)) /
             (2.0 * step);
  return d;
}

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      counter_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

std::array<std::uint32_t, 4> Philox4x32::block(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint64_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = kM0 * ctr[0];
    const std::uint64_t p1 = kM1 * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

void Philox4x32::refill() {
  buffer_ = block(counter_, key_);
  if (++counter_[0] == 0) ++counter_[1];
  used_ = 0;
}

Philox4x32::result_type Philox4x32::operator()() {
  if (used_ == 4) refill();
  return buffer_[static_cast<std::size_t>(used_++)];
}

std::uint64_t Philox4x32::next_u64() {
  const std::uint64_t hi = (*this)();
  const std::uint64_t lo = (*this)();
  return (hi << 32) | lo;
}

double Philox4x32::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

DiscreteSampler::DiscreteSampler(const std::vector<double>& weights) {
  double acc = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidRequest("sampler weights must be non-negative");
    acc += w;
    cdf_.push_back(acc);
  }
  if (!(acc > 0.0)) throw InvalidRequest("sampler weights sum to zero");
  // The last entry becomes exactly 1, so u in [0, 1) always lands on a
  // positive-weight outcome.
  for (auto& c : cdf_) c /= acc;
}

std::size_t DiscreteSampler::operator()(Philox4x32& rng) const {
  const double u = rng.uniform();
  return static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
}

std::vector<std::pair<int, int>> sample_shots(const JointDistribution& dist, std::int64_t m_shots, std::uint64_t seed) {
  if (m_shots < 1) throw InvalidRequest("sample_shots: m_shots must be >= 1");
  std::vector<double> w;
  for (const auto& o : dist.outcomes) w.push_back(o.probability);
  const DiscreteSampler sampler(w);
  Philox4x32 rng(seed);
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(m_shots));
  for (std::int64_t i = 0; i < m_shots; ++i) {
    const auto& o = dist.outcomes[sampler(rng)];
    out.emplace_back(o.two_j, o.two_m);
  }
  return out;
}

MomentEstimate invert_moments(double mean_j2_emp, double mean_jy_emp, const SqueezingConfig& config) {
  const auto roat = roat_moments(config);
  const double n = static_cast<double>(config.n());
  MomentEstimate est{kNaN, kNaN, {}};
  // <J^2> = 3N/4 + N(N-1)/4 (eta^2 (xx + yy) + zz)
  const double eta_sq = (4.0 * (mean_j2_emp - 3.0 * n / 4.0) / (n * (n - 1.0)) - roat.at("zz")) /
                        (roat.at("xx") + roat.at("yy"));
  if (!(eta_sq >= 0.0)) {
    est.flags.push_back("eta_root_negative");
    return est;
  }
  if (eta_sq > 1.0) {
    est.flags.push_back("eta_clamped_to_1");
    est.eta = 1.0;
  } else {
    est.eta = std::sqrt(eta_sq);
  }
  if (est.eta == 0.0) {
    est.flags.push_back("phi_unidentifiable");
    return est;
  }
  double arg = 2.0 * mean_jy_emp / (n * est.eta * roat.at("x"));
  if (std::abs(arg) > 1.0) {
    est.flags.push_back("phi_argument_clamped");
    arg = std::clamp(arg, -1.0, 1.0);
  }
  est.phi = std::asin(arg);
  return est;
}

Eigen::Vector2d McResult::diagonal_ratio() const {
  return {empirical_cov(0, 0) / predicted_cov(0, 0), empirical_cov(1, 1) / predicted_cov(1, 1)};
}

double McResult::off_diagonal_z() const { return empirical_cov(0, 1) / cov_standard_error(0, 1); }

McResult mc_experiment(const SqueezingConfig& config, const ChannelParams& params, std::int64_t m_shots,
                       std::int64_t repetitions, std::uint64_t seed, OraclePath path) {
  if (m_shots < 1 || repetitions < 2) throw InvalidRequest("mc_experiment: need m_shots >= 1 and repetitions >= 2");
  const int n = static_cast<int>(config.n());
  if (path == OraclePath::Auto) path = n <= kMaxDensityQubits ? OraclePath::Density : OraclePath::Trajectory;
  check_qubits(n, path == OraclePath::Density ? kMaxDensityQubits : kMaxTrajectoryQubits, "mc_experiment");

  McResult r;
  r.n = config.n();
  r.chi = config.chi();
  r.eta = params.eta();
  r.phi = params.phi();
  r.shots_per_experiment = m_shots;
  r.experiments = repetitions;
  r.seed = seed;
  r.path = path == OraclePath::Density ? "density" : "trajectory";

  const auto dist = output_distribution(config, params, path);
  const auto stats = stats_of(dist);
  try {
    const Eigen::Matrix2d d_inv = invert2(finite_difference_jacobian(config, params, tol::kFiniteDifferenceStep, path));
    r.predicted_cov = d_inv * stats.covariance() * d_inv.transpose() / static_cast<double>(m_shots);
  } catch (const NumericalError&) {
    r.predicted_cov.setConstant(kNaN);
    r.flags.push_back("prediction_singular");
  }

  // Shot samplers: one over the full distribution, or one per flip count.
  std::vector<DiscreteSampler> samplers;
  std::vector<std::vector<std::pair<double, double>>> values;
  auto add_sampler = [&](const JointDistribution& d) {
    std::vector<double> w;
    std::vector<std::pair<double, double>> v;
    for (const auto& o : d.outcomes) {
      w.push_back(o.probability);
      v.emplace_back(o.j2(), o.m());
    }
    samplers.emplace_back(w);
    values.push_back(std::move(v));
  };
  if (path == OraclePath::Density) {
    add_sampler(dist);
  } else {
    for (const auto& d : flip_count_distributions(config, params.phi())) add_sampler(d);
  }
  const double flip_probability = (1.0 - params.eta()) / 2.0;

  std::map<std::string, std::int64_t> flag_counts;
  std::vector<Eigen::Vector2d> estimates;
  for (std::int64_t rep = 0; rep < repetitions; ++rep) {
    Philox4x32 rng(seed, static_cast<std::uint64_t>(rep));
    double sum_j2 = 0.0, sum_m = 0.0;
    for (std::int64_t shot = 0; shot < m_shots; ++shot) {
      std::size_t which = 0;
      if (path == OraclePath::Trajectory)
        for (int s = 0; s < n; ++s) which += rng.uniform() < flip_probability ? 1 : 0;
      const auto& [j2, m] = values[which][samplers[which](rng)];
      sum_j2 += j2;
      sum_m += m;
    }
    const auto est = invert_moments(sum_j2 / static_cast<double>(m_shots), sum_m / static_cast<double>(m_shots), config);
    for (const auto& f : est.flags) ++flag_counts[f];
    if (std::isfinite(est.eta) && std::isfinite(est.phi)) {
      estimates.emplace_back(est.eta, est.phi);
    } else {
      ++r.failed_experiments;
    }
  }
  for (const auto& [f, count] : flag_counts) r.flags.push_back(f + " x" + std::to_string(count));

  const auto v = static_cast<double>(estimates.size());
  if (estimates.size() < 2) {
    r.empirical_cov.setConstant(kNaN);
    r.flags.push_back("too_few_valid_experiments");
    return r;
  }
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& e : estimates) mean += e;
  mean /= v;
  for (const auto& e : estimates) r.empirical_cov += (e - mean) * (e - mean).transpose();
  r.empirical_cov /= (v - 1.0);
  const double phi_true = std::remainder(params.phi(), 2.0 * pi_v<double>());
  r.bias = mean - Eigen::Vector2d(params.eta(), phi_true);
  for (int i = 0; i < 2; ++i) {
    r.bias_standard_error[i] = std::sqrt(r.empirical_cov(i, i) / v);
    r.cov_standard_error(i, i) = r.empirical_cov(i, i) * std::sqrt(2.0 / (v - 1.0));
  }
  const double off = std::sqrt(
      (r.empirical_cov(0, 0) * r.empirical_cov(1, 1) + r.empirical_cov(0, 1) * r.empirical_cov(0, 1)) / (v - 1.0));
  r.cov_standard_error(0, 1) = off;
  r.cov_standard_error(1, 0) = off;
  return r;
}

nlohmann::json to_json(const McResult& r) {
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  auto mat = [&](const Eigen::Matrix2d& m) {
    return nlohmann::json::array({nlohmann::json::array({num(m(0, 0)), num(m(0, 1))}),
                                  nlohmann::json::array({num(m(1, 0)), num(m(1, 1))})});
  };
  const auto ratio = r.diagonal_ratio();
  return {
      {"version", kVersion},
      {"n", r.n},
      {"chi", r.chi},
      {"eta", r.eta},
      {"phi", r.phi},
      {"shots_per_experiment", r.shots_per_experiment},
      {"experiments", r.experiments},
      {"seed", r.seed},
      {"rng", r.rng},
      {"path", r.path},
      {"empirical_cov", mat(r.empirical_cov)},
      {"predicted_cov", mat(r.predicted_cov)},
      {"cov_standard_error", mat(r.cov_standard_error)},
      {"diagonal_ratio", {num(ratio[0]), num(ratio[1])}},
      {"off_diagonal_z", num(r.off_diagonal_z())},
      {"bias", {num(r.bias[0]), num(r.bias[1])}},
      {"bias_standard_error", {num(r.bias_standard_error[0]), num(r.bias_standard_error[1])}},
      {"failed_experiments", r.failed_experiments},
      {"flags", r.flags},
  };
}

EpsilonScan brute_force_epsilon(int n, double chi) {
  check_qubits(n, kMaxTrajectoryQubits, "brute_force_epsilon");
  const VectorXcd oat = build_oat_state(n, chi).amplitudes();
  auto var_jy = [&](double eps) {
    VectorXcd psi = oat;
    const double theta = eps + pi_v<double>() / 2;
    Matrix2cd r;
    r << std::cos(theta / 2), kI * std::sin(theta / 2), kI * std::sin(theta / 2), std::cos(theta / 2);
    apply_sitewise(psi, r);
    const VectorXcd jy = apply_collective(Axis::Y, psi);
    const double mean = psi.dot(jy).real();
    return jy.squaredNorm() - mean * mean;
  };
  constexpr int kGrid = 401;
  const double pi = pi_v<double>();
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    const double v = var_jy(pi * i / kGrid);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = pi * (best - 1) / kGrid, b = pi * (best + 1) / kGrid;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = var_jy(c), fd = var_jy(d);
  while (b - a > 1e-11) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = var_jy(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = var_jy(d);
    }
  }
  double eps = std::fmod((a + b) / 2.0, pi);
  if (eps < 0) eps += pi;
  return {eps, var_jy(eps)};
}

double angular_distance(double a, double b, double period) {
  const double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

}  // namespace twistsense::oracle
