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


#include <doctest.h>

#include <cmath>

#include "twistsense/channel.hpp"
#include "twistsense/numeric.hpp"
#include "twistsense/oracle.hpp"

using namespace twistsense;

namespace {

double max_abs(const Operator2& m) { return m.cwiseAbs().maxCoeff(); }

Operator2 plus_projector() { return Operator2::Constant(Complex(0.5)); }

}  // namespace

TEST_CASE("channel params validate and reduce the phase") {
  CHECK_THROWS_AS(ChannelParams(-0.1, 0.0), InvalidRequest);
  CHECK_THROWS_AS(ChannelParams(1.1, 0.0), InvalidRequest);
  CHECK_THROWS_AS(ChannelParams(0.5, std::nan("")), InvalidRequest);
  CHECK(ChannelParams(0.5, -0.5).phi() == doctest::Approx(2 * M_PI - 0.5));
  CHECK(ChannelParams(0.5, 7.0).phi() == doctest::Approx(7.0 - 2 * M_PI));
}

TEST_CASE("kraus operators") {
  SUBCASE("noiseless identity") {
    const auto k = kraus_ops(ChannelParams(1.0, 0.0));
    CHECK(max_abs(k[0] - identity2()) == 0.0);
    CHECK(max_abs(k[1]) == 0.0);
  }
  SUBCASE("full dephasing weights") {
    const auto k = kraus_ops(ChannelParams(0.0, 0.0));
    CHECK(max_abs(k[0] - identity2() / std::sqrt(2.0)) <= 1e-15);
    CHECK(max_abs(k[1] - pauli(Axis::Z) / std::sqrt(2.0)) <= 1e-15);
  }
  SUBCASE("completeness on random parameters") {
    oracle::Philox4x32 rng(1);
    for (int i = 0; i < 100; ++i) {
      const ChannelParams p(rng.uniform(), 2 * M_PI * rng.uniform());
      const auto k = kraus_ops(p);
      CHECK(max_abs(k[0].adjoint() * k[0] + k[1].adjoint() * k[1] - identity2()) <= tol::kCompleteness);
    }
    const auto k = kraus_ops(ChannelParams(0.5, M_PI));
    CHECK(max_abs(k[0].adjoint() * k[0] + k[1].adjoint() * k[1] - identity2()) <= tol::kCompleteness);
  }
}

TEST_CASE("apply_channel") {
  CHECK(max_abs(apply_channel(plus_projector(), ChannelParams(1.0, 0.0)) - plus_projector()) < 1e-15);
  CHECK(max_abs(apply_channel(plus_projector(), ChannelParams(0.0, 1.3)) - identity2() / 2.0) < 1e-15);
  const auto out = apply_channel(plus_projector(), ChannelParams(0.8, 0.0));
  CHECK(out(0, 1).real() == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(out(1, 0).real() == doctest::Approx(0.4).epsilon(1e-15));

  SUBCASE("off-diagonal picks up eta e^{-i phi}") {
    Operator2 rho;
    rho << 0.7, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.3;
    const ChannelParams p(0.6, 0.9);
    const auto o = apply_channel(rho, p);
    CHECK(std::abs(o(0, 0) - rho(0, 0)) < 1e-15);
    CHECK(std::abs(o(1, 1) - rho(1, 1)) < 1e-15);
    CHECK(std::abs(o(0, 1) - rho(0, 1) * 0.6 * std::polar(1.0, -0.9)) < 1e-15);
    CHECK(std::abs(o.trace() - Complex(1.0)) < 1e-15);
    Eigen::SelfAdjointEigenSolver<Operator2> es(o);
    CHECK(es.eigenvalues().minCoeff() >= -tol::kPsdSlack);
  }
  SUBCASE("rejects non-density input") {
    Operator2 bad = identity2() * 0.55;
    CHECK_THROWS_AS(apply_channel(bad, ChannelParams(0.5, 0.0)), InvalidRequest);
    Operator2 neg;
    neg << 1.2, 0.0, 0.0, -0.2;
    CHECK_THROWS_AS(apply_channel(neg, ChannelParams(0.5, 0.0)), InvalidRequest);
  }
}

TEST_CASE("dual map") {
  const auto z = dual_pauli(Axis::Z, ChannelParams(0.3, 1.2));
  CHECK(z[Axis::Z] == 1.0);
  CHECK(z[Axis::X] == 0.0);
  CHECK(z[Axis::Y] == 0.0);
  const auto x0 = dual_pauli(Axis::X, ChannelParams(0.0, 2.0));
  CHECK(max_abs(x0.to_matrix()) == 0.0);
  const auto xr = dual_pauli(Axis::X, ChannelParams(1.0, M_PI / 2));
  CHECK(max_abs(xr.to_matrix() + pauli(Axis::Y)) < 1e-15);

  oracle::Philox4x32 rng(2);
  for (int i = 0; i < 100; ++i) {
    const ChannelParams p(rng.uniform(), 2 * M_PI * rng.uniform());
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
      const auto combo = dual_pauli(a, p);
      CHECK(combo.identity() == 0.0);
      CHECK(max_abs(combo.to_matrix() - dual_channel(pauli(a), p)) <= 1e-14);
    }
    CHECK(max_abs(dual_channel(identity2(), p) - identity2()) <= 1e-15);
  }
}

TEST_CASE("single-qubit QFI") {
  SUBCASE("closed form") {
    const auto r = single_qubit_qfi(ChannelParams(0.8, 0.0));
    CHECK(r.f_matrix(0, 0) == doctest::Approx(1.0 / 0.36));
    CHECK(r.f_matrix(1, 1) == doctest::Approx(0.64));
    CHECK(r.f_matrix(0, 1) == 0.0);
    const auto z = single_qubit_qfi(ChannelParams(0.0, 0.0));
    CHECK(z.f_matrix(0, 0) == 1.0);
    CHECK(z.f_matrix(1, 1) == 0.0);
  }
  SUBCASE("numeric SLD solve agrees") {
    for (double eta : {0.2, 0.5, 0.6, 0.8}) {
      for (double phi : {0.0, 0.4, 3.0}) {
        const ChannelParams p(eta, phi);
        const Operator2 rho = plus_state_output(p);
        const Operator2 le = solve_sld(rho, plus_state_output_d_eta(p));
        const Operator2 lp = solve_sld(rho, plus_state_output_d_phi(p));
        const auto r = single_qubit_qfi(p);
        CHECK(max_abs(le - r.sld_eta) < 1e-9);
        CHECK(max_abs(lp - r.sld_phi) < 1e-9);
        CHECK((rho * le * le).trace().real() == doctest::Approx(1 / (1 - eta * eta)).epsilon(1e-12));
        CHECK((rho * lp * lp).trace().real() == doctest::Approx(eta * eta).epsilon(1e-12));
        CHECK(std::abs((rho * (le * lp + lp * le)).trace()) < 1e-9);
        CHECK(std::abs((rho * (le * lp - lp * le)).trace()) < 1e-12);
        CHECK(r.commutator_trace < 1e-12);
      }
    }
    const ChannelParams p(0.6, 0.0);
    const Operator2 rho = plus_state_output(p);
    const Operator2 le = solve_sld(rho, plus_state_output_d_eta(p));
    CHECK((rho * le * le).trace().real() == doctest::Approx(1.5625).epsilon(1e-9));
  }
  SUBCASE("noiseless edge is flagged") {
    const auto r = single_qubit_qfi(ChannelParams(1.0, 0.0));
    CHECK(r.eta_divergent);
    CHECK(std::isinf(r.f_matrix(0, 0)));
    CHECK(r.f_matrix(1, 1) == 1.0);
  }
  SUBCASE("QFI matrix is PSD") {
    oracle::Philox4x32 rng(3);
    for (int i = 0; i < 50; ++i) {
      const auto r = single_qubit_qfi(ChannelParams(0.999 * rng.uniform(), 6.0 * rng.uniform()));
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(r.f_matrix);
      CHECK(es.eigenvalues().minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("solve_sld rejects a rank-deficient state") {
  Operator2 pure = Operator2::Zero();
  pure(0, 0) = 1.0;
  CHECK_THROWS_AS(solve_sld(pure, pauli(Axis::X)), NumericalError);
}
