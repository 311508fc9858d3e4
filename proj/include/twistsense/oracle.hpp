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

// Brute-force small-N ground truth. Basis index bit s is qubit s; bit value 0
// is the +1 eigenstate of sigma_z.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "twistsense/estimation.hpp"

namespace twistsense::oracle {

inline constexpr int kMaxDensityQubits = 12;
inline constexpr int kMaxTrajectoryQubits = 16;

class DenseState {
 public:
  /// Unit-norm amplitudes (deviation <= 1e-12).
  static DenseState pure(Eigen::VectorXcd amplitudes);
  /// Hermitian, unit trace, non-negative diagonal. With full_check the
  /// spectrum is also required to be >= -1e-10.
  static DenseState mixed(Eigen::MatrixXcd rho, bool full_check = false);

  int n() const { return n_; }
  bool is_pure() const { return std::holds_alternative<Eigen::VectorXcd>(data_); }
  const Eigen::VectorXcd& amplitudes() const;
  const Eigen::MatrixXcd& density() const;
  Eigen::MatrixXcd to_density() const;

 private:
  DenseState(int n, std::variant<Eigen::VectorXcd, Eigen::MatrixXcd> data) : n_(n), data_(std::move(data)) {}

  int n_;
  std::variant<Eigen::VectorXcd, Eigen::MatrixXcd> data_;
};

/// |+>^n.
Eigen::VectorXcd plus_state(int n);

/// e^{-i chi J_z^2}|+>^n, n <= 16.
DenseState build_oat_state(int n, double chi);
/// OAT state followed by e^{i theta J_x}, applied site by site.
DenseState build_rotated_oat_state(int n, double chi, double theta);
/// Rotation angle theta = epsilon + pi/2.
DenseState build_roat_state(int n, double chi);

/// Applies the 2x2 operator `a` to every qubit of a state vector.
void apply_sitewise(Eigen::VectorXcd& psi, const Eigen::Matrix2cd& a);
/// rho -> A^{(x)n} rho A^{(x)n}^dagger, in place.
void conjugate_sitewise(Eigen::MatrixXcd& rho, const Eigen::Matrix2cd& a);

enum class KrausOrder {
  RotationAfterDephasing,   // {U_phi K^k}
  RotationBeforeDephasing,  // {K^k U_phi}
};

/// Lambda^{(x)n}(rho) by site-wise Kraus conjugation, n <= 12.
DenseState evolve_density(const DenseState& state, const ChannelParams& params,
                          KrausOrder order = KrausOrder::RotationAfterDephasing);

/// Tr(rho sigma_{word[0]}^{sites[0]} ... ). Sites must be distinct.
double exact_moment(const DenseState& state, const PauliWord& word, const std::vector<int>& sites);

/// J_axis |psi> without forming the operator.
Eigen::VectorXcd apply_collective(Axis axis, const Eigen::VectorXcd& psi);
/// Dense collective operators for small n (n <= 10).
Eigen::MatrixXcd dense_collective(int n, Axis axis);
Eigen::MatrixXcd dense_total_j2(int n);

/// Eigenvectors of (J^2, J_z) restricted to one J_z block, as real
/// coefficients over the listed computational indices. The simultaneous
/// (J^2, J_y) eigenvectors are W^{(x)n} applied to these, where
/// W = [[1, 1], [i, -i]]/sqrt(2) maps sigma_z to sigma_y.
struct JointBasisBlock {
  int two_m;
  std::vector<std::uint32_t> indices;
  Eigen::MatrixXd vectors;  // columns
  std::vector<int> two_j;   // one label per column
};

struct JointBasis {
  int n;
  std::vector<JointBasisBlock> blocks;
  double max_residual = 0.0;

  /// Number of copies of each irrep, keyed by 2j.
  std::map<int, int> multiplicities() const;
};

/// Throws NumericalError if any eigenpair misses its j(j+1) label by more
/// than the degeneracy residual. n <= 12.
JointBasis joint_measurement_basis(int n);
/// Cached per n; not thread safe across first use.
const JointBasis& cached_joint_basis(int n);

/// W = [[1, 1], [i, -i]]/sqrt(2).
Eigen::Matrix2cd y_basis_map();

struct JointOutcome {
  int two_j;
  int two_m;
  double probability;

  double j2() const { return two_j * (two_j + 2) / 4.0; }
  double m() const { return two_m / 2.0; }
};

struct JointDistribution {
  int n = 0;
  std::vector<JointOutcome> outcomes;  // sorted by (two_j, two_m)

  double total() const;
  double mean_j2() const;
  double mean_jy() const;
};

/// Measurement statistics of (J^2, J_y) in the given state.
JointDistribution joint_distribution(const DenseState& state, const JointBasis& basis);

/// Exact output distribution as a mixture over sigma_z flip counts, valid to
/// n = 16 because each flip pattern only couples two symmetric blocks.
JointDistribution trajectory_distribution(const SqueezingConfig& config, const ChannelParams& params);

/// (J^2, J_y) distribution of U_phi^{(x)n} Z_F |ROAT> with |F| = k flipped sites.
std::vector<JointDistribution> flip_count_distributions(const SqueezingConfig& config, double phi);

enum class OraclePath { Auto, Density, Trajectory };

/// Density path for n <= 12 under Auto, trajectory path up to 16.
JointDistribution output_distribution(const SqueezingConfig& config, const ChannelParams& params,
                                      OraclePath path = OraclePath::Auto);

struct OracleStats {
  double mean_j2;
  double mean_jy;
  double var_j2;
  double var_jy;
  double cov_j2_jy;

  Eigen::Matrix2d covariance() const;
};

OracleStats stats_of(const JointDistribution& dist);

/// Central differences (step 1e-5) of the oracle means; rows (<J^2>, <J_y>),
/// columns (eta, phi). A one-sided eta difference is used at the eta edges.
Eigen::Matrix2d finite_difference_jacobian(const SqueezingConfig& config, const ChannelParams& params,
                                           double step = tol::kFiniteDifferenceStep,
                                           OraclePath path = OraclePath::Auto);

/// Philox4x32 with 10 rounds.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  static constexpr const char* kName = "philox4x32-10";

  Philox4x32(std::uint64_t seed, std::uint64_t stream = 0);

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xffffffffu; }
  result_type operator()();
  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

/// Inverse-CDF sampler over a discrete distribution.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const std::vector<double>& weights);
  std::size_t operator()(Philox4x32& rng) const;

 private:
  std::vector<double> cdf_;
};

/// i.i.d. (2j, 2m) draws.
std::vector<std::pair<int, int>> sample_shots(const JointDistribution& dist, std::int64_t m_shots,
                                              std::uint64_t seed);

struct MomentEstimate {
  double eta;
  double phi;
  std::vector<std::string> flags;
};

/// Inverts <J^2>(eta) and <J_y>(eta, phi) on empirical means. Failures are
/// reported as flags and a NaN estimate, never thrown.
MomentEstimate invert_moments(double mean_j2_emp, double mean_jy_emp, const SqueezingConfig& config);

struct McResult {
  std::int64_t n;
  double chi;
  double eta;
  double phi;
  std::int64_t shots_per_experiment;
  std::int64_t experiments;
  std::uint64_t seed;
  std::string rng = Philox4x32::kName;
  std::string path;
  Eigen::Matrix2d empirical_cov = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d predicted_cov = Eigen::Matrix2d::Zero();
  Eigen::Vector2d bias = Eigen::Vector2d::Zero();
  Eigen::Vector2d bias_standard_error = Eigen::Vector2d::Zero();
  /// Standard error of each empirical covariance entry.
  Eigen::Matrix2d cov_standard_error = Eigen::Matrix2d::Zero();
  std::int64_t failed_experiments = 0;
  std::vector<std::string> flags;

  /// empirical / predicted on the diagonal.
  Eigen::Vector2d diagonal_ratio() const;
  /// Empirical off-diagonal in units of its standard error.
  double off_diagonal_z() const;
};

McResult mc_experiment(const SqueezingConfig& config, const ChannelParams& params, std::int64_t m_shots,
                       std::int64_t repetitions, std::uint64_t seed, OraclePath path = OraclePath::Auto);

nlohmann::json to_json(const McResult& result);

struct EpsilonScan {
  double epsilon;
  double min_var_jy;
};

/// Minimizes Var(J_y) over the x-rotation of the OAT state: 401-point grid on
/// epsilon in [0, pi) refined by golden-section search.
EpsilonScan brute_force_epsilon(int n, double chi);

/// Smallest distance between two angles modulo `period`.
double angular_distance(double a, double b, double period);

}  // namespace twistsense::oracle
