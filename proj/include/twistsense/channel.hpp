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

// Single-qubit phase + dephasing channel: Kraus form, Heisenberg (dual) form
// and the single-qubit quantum Fisher information / SLD algebra.

#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace twistsense {

using Complex = std::complex<double>;
using Operator2 = Eigen::Matrix2cd;

enum class Axis : int { X = 0, Y = 1, Z = 2 };

char axis_label(Axis a);
Axis axis_from_label(char c);

/// (eta, phi) for one use of the sensing channel.
///
/// eta is the factor by which the equatorial Bloch components shrink
/// (1 = noiseless, 0 = full dephasing); phi is the rotation about z and is
/// stored reduced to [0, 2pi).
class ChannelParams {
 public:
  ChannelParams(double eta, double phi);

  double eta() const { return eta_; }
  double phi() const { return phi_; }

 private:
  double eta_;
  double phi_;
};

/// Real combination c0*1 + c1*sx + c2*sy + c3*sz.
struct PauliCombo {
  std::array<double, 4> coeffs{};

  double identity() const { return coeffs[0]; }
  double operator[](Axis a) const { return coeffs[static_cast<int>(a) + 1]; }
  Operator2 to_matrix() const;
};

const Operator2& pauli(Axis a);
Operator2 identity2();

/// {U_phi K0, U_phi K1} with U_phi = exp(-i phi sz / 2).
std::array<Operator2, 2> kraus_ops(const ChannelParams& params);

/// Checks trace and positivity within tol::kPsdSlack.
void require_density(const Operator2& rho);

/// Schroedinger-picture action on a single-qubit state.
Operator2 apply_channel(const Operator2& rho, const ChannelParams& params);

/// Heisenberg picture: sum_k K_k^dag A K_k.
Operator2 dual_channel(const Operator2& observable, const ChannelParams& params);

/// Dual image of a Pauli operator, as a PauliCombo. Identity part is zero.
PauliCombo dual_pauli(Axis axis, const ChannelParams& params);

struct QfiReport {
  Eigen::Matrix2d f_matrix;  // rows/cols (eta, phi)
  Operator2 sld_eta;
  Operator2 sld_phi;
  double commutator_trace = 0.0;  // |Tr(rho_out [L_eta, L_phi])|
  bool eta_divergent = false;     // eta == 1: F_eta_eta = +inf, sld_eta undefined
};

/// QFI matrix and SLDs of the channel output for the input |+><+|.
QfiReport single_qubit_qfi(const ChannelParams& params);

/// Solves d_rho = (rho L + L rho)/2 for L as a dense 4x4 linear system.
Operator2 solve_sld(const Operator2& rho, const Operator2& d_rho);

/// Output state for input |+><+| and its derivatives with respect to eta and phi.
Operator2 plus_state_output(const ChannelParams& params);
Operator2 plus_state_output_d_eta(const ChannelParams& params);
Operator2 plus_state_output_d_phi(const ChannelParams& params);

}  // namespace twistsense
