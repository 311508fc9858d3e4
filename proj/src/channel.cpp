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

#include "twistsense/channel.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "twistsense/numeric.hpp"

namespace twistsense {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
constexpr Complex kI{0.0, 1.0};

}  // namespace

char axis_label(Axis a) {
  switch (a) {
    case Axis::X: return 'x';
    case Axis::Y: return 'y';
    case Axis::Z: return 'z';
  }
  return '?';
}

Axis axis_from_label(char c) {
  switch (c) {
    case 'x': case 'X': return Axis::X;
    case 'y': case 'Y': return Axis::Y;
    case 'z': case 'Z': return Axis::Z;
    default: throw InvalidRequest(std::string("unknown Pauli axis '") + c + "'");
  }
}

ChannelParams::ChannelParams(double eta, double phi) : eta_(eta), phi_(phi) {
  if (!std::isfinite(eta) || eta < 0.0 || eta > 1.0)
    throw InvalidRequest("eta must lie in [0, 1], got " + std::to_string(eta));
  if (!std::isfinite(phi)) throw InvalidRequest("phi must be finite");
  phi_ = std::fmod(phi, kTwoPi);
  if (phi_ < 0.0) phi_ += kTwoPi;
  if (phi_ >= kTwoPi) phi_ = 0.0;
}

const Operator2& pauli(Axis a) {
  static const Operator2 sx = (Operator2() << 0, 1, 1, 0).finished();
  static const Operator2 sy = (Operator2() << 0, -kI, kI, 0).finished();
  static const Operator2 sz = (Operator2() << 1, 0, 0, -1).finished();
  switch (a) {
    case Axis::X: return sx;
    case Axis::Y: return sy;
    case Axis::Z: return sz;
  }
  return sz;
}

Operator2 identity2() { return Operator2::Identity(); }

Operator2 PauliCombo::to_matrix() const {
  return coeffs[0] * identity2() + coeffs[1] * pauli(Axis::X) + coeffs[2] * pauli(Axis::Y) +
         coeffs[3] * pauli(Axis::Z);
}

std::array<Operator2, 2> kraus_ops(const ChannelParams& params) {
  const double eta = params.eta();
  const double phi = params.phi();
  Operator2 u = Operator2::Zero();
  u(0, 0) = std::exp(-kI * (phi / 2.0));
  u(1, 1) = std::exp(kI * (phi / 2.0));
  const Operator2 k0 = std::sqrt((1.0 + eta) / 2.0) * identity2();
  const Operator2 k1 = std::sqrt((1.0 - eta) / 2.0) * pauli(Axis::Z);
  return {u * k0, u * k1};
}

void require_density(const Operator2& rho) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol::kPsdSlack)
    throw InvalidRequest("density operator is not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > tol::kPsdSlack)
    throw InvalidRequest("density operator trace deviates from 1");
  Eigen::SelfAdjointEigenSolver<Operator2> es(rho);
  if (es.eigenvalues().minCoeff() < -tol::kPsdSlack)
    throw InvalidRequest("density operator has a negative eigenvalue");
}

Operator2 apply_channel(const Operator2& rho, const ChannelParams& params) {
  require_density(rho);
  Operator2 out = Operator2::Zero();
  for (const auto& k : kraus_ops(params)) out += k * rho * k.adjoint();
  return out;
}

Operator2 dual_channel(const Operator2& observable, const ChannelParams& params) {
  Operator2 out = Operator2::Zero();
  for (const auto& k : kraus_ops(params)) out += k.adjoint() * observable * k;
  return out;
}

PauliCombo dual_pauli(Axis axis, const ChannelParams& params) {
  const double eta = params.eta();
  const double c = std::cos(params.phi());
  const double s = std::sin(params.phi());
  PauliCombo out;
  switch (axis) {
    case Axis::X: out.coeffs = {0.0, eta * c, -eta * s, 0.0}; break;
    case Axis::Y: out.coeffs = {0.0, eta * s, eta * c, 0.0}; break;
    case Axis::Z: out.coeffs = {0.0, 0.0, 0.0, 1.0}; break;
  }
  return out;
}

Operator2 plus_state_output(const ChannelParams& params) {
  const double eta = params.eta();
  const double phi = params.phi();
  return 0.5 * (identity2() + eta * (std::cos(phi) * pauli(Axis::X) + std::sin(phi) * pauli(Axis::Y)));
}

Operator2 plus_state_output_d_eta(const ChannelParams& params) {
  const double phi = params.phi();
  return 0.5 * (std::cos(phi) * pauli(Axis::X) + std::sin(phi) * pauli(Axis::Y));
}

Operator2 plus_state_output_d_phi(const ChannelParams& params) {
  const double eta = params.eta();
  const double phi = params.phi();
  return 0.5 * eta * (-std::sin(phi) * pauli(Axis::X) + std::cos(phi) * pauli(Axis::Y));
}

Operator2 solve_sld(const Operator2& rho, const Operator2& d_rho) {
  // Column-major vec: column (a + 2b) is the image of the unit matrix E_ab.
  Eigen::Matrix4cd system;
  for (int b = 0; b < 2; ++b) {
    for (int a = 0; a < 2; ++a) {
      Operator2 e = Operator2::Zero();
      e(a, b) = 1.0;
      const Operator2 img = 0.5 * (rho * e + e * rho);
      system.col(a + 2 * b) = Eigen::Map<const Eigen::Vector4cd>(img.data());
    }
  }
  Eigen::FullPivLU<Eigen::Matrix4cd> lu(system);
  if (!lu.isInvertible()) throw NumericalError("SLD equation is singular (rank-deficient state)");
  const Eigen::Vector4cd rhs = Eigen::Map<const Eigen::Vector4cd>(d_rho.data());
  const Eigen::Vector4cd sol = lu.solve(rhs);
  Operator2 l = Eigen::Map<const Operator2>(sol.data());
  return 0.5 * (l + l.adjoint());
}

QfiReport single_qubit_qfi(const ChannelParams& params) {
  const double eta = params.eta();
  const double phi = params.phi();
  const Operator2 n_sigma = std::cos(phi) * pauli(Axis::X) + std::sin(phi) * pauli(Axis::Y);
  const Operator2 t_sigma = -std::sin(phi) * pauli(Axis::X) + std::cos(phi) * pauli(Axis::Y);

  QfiReport report;
  report.sld_phi = eta * t_sigma;
  report.f_matrix.setZero();
  report.f_matrix(1, 1) = eta * eta;
  if (eta >= 1.0) {
    report.eta_divergent = true;
    report.f_matrix(0, 0) = std::numeric_limits<double>::infinity();
    report.sld_eta.setConstant(Complex(std::numeric_limits<double>::quiet_NaN(), 0.0));
    report.commutator_trace = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  report.f_matrix(0, 0) = 1.0 / (1.0 - eta * eta);
  report.sld_eta = (n_sigma - eta * identity2()) / (1.0 - eta * eta);

  const Operator2 rho = plus_state_output(params);
  const Operator2 comm = report.sld_eta * report.sld_phi - report.sld_phi * report.sld_eta;
  report.commutator_trace = std::abs((rho * comm).trace());
  return report;
}

}  // namespace twistsense
