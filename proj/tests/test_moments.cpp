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
#include <fstream>
#include <limits>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "twistsense/moments.hpp"
#include "twistsense/oracle.hpp"

using namespace twistsense;

namespace {

using Ref256 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<256>>;

MomentTable load_golden(const std::string& name) {
  std::ifstream f(std::string(TWISTSENSE_GOLDEN_DIR) + "/" + name);
  REQUIRE(f.good());
  return moment_table_from_json(nlohmann::json::parse(f));
}

std::vector<int> first_sites(std::size_t k) {
  std::vector<int> s;
  for (std::size_t i = 0; i < k; ++i) s.push_back(static_cast<int>(i));
  return s;
}

}  // namespace

TEST_CASE("pauli words are canonical multisets") {
  CHECK(PauliWord("zyx").str() == "xyz");
  CHECK(PauliWord("yx") == PauliWord("xy"));
  CHECK(PauliWord("xzz").odd_yz() == false);
  CHECK(PauliWord("xyzz").odd_yz() == true);
  CHECK(PauliWord("xyyz").count(Axis::Y) == 2);
  CHECK(PauliWord("zz") < PauliWord("xxx"));
  CHECK_THROWS_AS(PauliWord("xxxxx"), InvalidRequest);
  CHECK_THROWS_AS(PauliWord("xq"), InvalidRequest);
  CHECK(all_words(4).size() == 34);
  CHECK(all_words(2).size() == 9);
}

TEST_CASE("squeezing config") {
  CHECK_THROWS_AS(SqueezingConfig::from_chi(1, 0.1), InvalidRequest);
  CHECK_THROWS_AS(SqueezingConfig::from_chi(10, -0.1), InvalidRequest);
  CHECK_THROWS_AS(SqueezingConfig::from_chi(10, M_PI / 2), InvalidRequest);
  CHECK_THROWS_AS(SqueezingConfig::from_exponent(10, 0.5), InvalidRequest);
  const auto c = SqueezingConfig::from_exponent(1000, -std::numeric_limits<double>::infinity());
  CHECK(c.chi() == 0.0);
  CHECK(c.epsilon() == doctest::Approx(M_PI / 4));
  const auto d = SqueezingConfig::from_exponent(1000000, -5.0 / 6.0);
  CHECK(d.chi() == doctest::Approx(1e-5).epsilon(1e-12));
  CHECK(*d.p() == doctest::Approx(-5.0 / 6.0));
}

TEST_CASE("epsilon angle") {
  CHECK(epsilon_angle(4, 0.3) == doctest::Approx(0.6417272424404218).epsilon(1e-14));
  CHECK(epsilon_angle(10, 0.0) == doctest::Approx(M_PI / 4));
  CHECK_THROWS_AS(epsilon_angle(10, 2.0), InvalidRequest);
}

TEST_CASE("OAT closed forms") {
  CHECK(oat_moment(PauliWord("xx"), 2, M_PI / 2) == doctest::Approx(1.0));
  CHECK(oat_moment(PauliWord("x"), 4, 0.3) == doctest::Approx(std::pow(std::cos(0.3), 3)).epsilon(1e-15));
  CHECK(oat_moment(PauliWord("xx"), 4, 0.3) == doctest::Approx(0.8405894386191683).epsilon(1e-14));
  CHECK(oat_moment(PauliWord("yz"), 4, 0.3) == doctest::Approx(0.2697117790722057).epsilon(1e-14));
  CHECK(oat_moment(PauliWord("zz"), 9, 0.3) == 0.0);
  CHECK(oat_moment(PauliWord("xyy"), 9, 0.0) == 0.0);
  CHECK(oat_moment(PauliWord("xy"), 9, 0.4) == 0.0);
  CHECK_THROWS_AS(oat_moment(PauliWord("xxxx"), 3, 0.3), InvalidRequest);

  SUBCASE("agree with state vectors") {
    for (int n = 4; n <= 7; ++n) {
      for (double chi : {0.11, 0.9, 1.4}) {
        const auto state = oracle::build_oat_state(n, chi);
        for (const auto& w : all_words(4))
          CHECK(std::abs(oat_moment(w, n, chi) - oracle::exact_moment(state, w, first_sites(w.size()))) < 1e-12);
      }
    }
  }
  SUBCASE("tables stop at n sites") {
    const auto t = oat_moments(SqueezingConfig::from_chi(3, 0.2));
    CHECK(t.contains(PauliWord("xyz")));
    CHECK_FALSE(t.contains(PauliWord("xxyz")));
    CHECK_THROWS_AS(t.at("xxyz"), IncompleteTableError);
  }
}

TEST_CASE("ROAT frame") {
  const auto config = SqueezingConfig::from_chi(4, 0.3);
  const auto roat = roat_moments(config);
  CHECK(roat.frame() == Frame::Roat);
  CHECK(roat.at("yy") == doctest::Approx(-0.2015372757270515).epsilon(1e-13));
  CHECK(roat.at("zz") == doctest::Approx(0.36094783710788314).epsilon(1e-13));
  CHECK(roat.at("xx") == doctest::Approx(0.8405894386191683).epsilon(1e-13));
  CHECK(std::abs(roat.at("yz")) < 1e-15);
  for (const auto& w : all_words(4))
    if (w.odd_yz()) CHECK(std::abs(roat.at(w)) < 1e-15);

  SUBCASE("golden file") {
    const auto golden = load_golden("roat_n4_chi0.3.json");
    CHECK(golden.frame() == Frame::Roat);
    for (const auto& [w, v] : golden.entries()) CHECK(std::abs(roat.at(w) - v) < 1e-12);
  }
  SUBCASE("chi = 0 is the product state") {
    const auto t = roat_moments(SqueezingConfig::from_chi(6, 0.0));
    CHECK(t.at("xxxx") == 1.0);
    CHECK(t.at("yy") == 0.0);
  }
  SUBCASE("rotation requires an OAT table") {
    CHECK_THROWS_AS(rotate_moments(roat, 0.1), InvalidRequest);
    const auto r = rotate_moments(oat_moments(config), config.epsilon() + M_PI / 2);
    for (const auto& [w, v] : r.entries()) CHECK(std::abs(v - roat.at(w)) < 1e-15);
  }
  SUBCASE("leading terms describe large N") {
    const std::int64_t n = 100000000;
    const double chi = std::pow(static_cast<double>(n), -5.0 / 6.0);
    const auto big = roat_moments(SqueezingConfig::from_chi(n, chi));
    for (const char* w : {"x", "xx", "xxx", "xxxx"})
      CHECK(big.at(w) == doctest::Approx(*roat_leading_term(PauliWord(w), n, chi)).epsilon(1e-9));
    CHECK(*roat_leading_term(PauliWord("yz"), n, chi) == 0.0);
    CHECK_FALSE(roat_leading_term(PauliWord("xxy"), n, chi).has_value());
  }
}

TEST_CASE("output frame") {
  const auto config = SqueezingConfig::from_chi(4, 0.3);
  const ChannelParams params(0.8, 0.5);
  const auto out = output_moments(roat_moments(config), params);
  const auto golden = load_golden("output_n4_chi0.3_eta0.8_phi0.5.json");
  for (const auto& [w, v] : golden.entries()) CHECK(std::abs(out.at(w) - v) < 1e-12);
  CHECK_THROWS_AS(output_moments(oat_moments(config), params), InvalidRequest);

  SUBCASE("zz-type moments are untouched and xx + yy scales with eta^2") {
    const auto roat = roat_moments(config);
    CHECK(out.at("zz") == doctest::Approx(roat.at("zz")));
    CHECK(out.at("xx") + out.at("yy") == doctest::Approx(0.64 * (roat.at("xx") + roat.at("yy"))));
  }
}

TEST_CASE("JSON round trip") {
  const auto config = SqueezingConfig::from_chi(5, 0.4);
  const auto t = output_moments(roat_moments(config), ChannelParams(0.7, 1.0));
  const auto j = to_json(t);
  CHECK(j.at("version") == kVersion);
  CHECK(j.at("frame") == "OUTPUT");
  const auto back = moment_table_from_json(j);
  CHECK(back.frame() == Frame::Output);
  CHECK(back.entries().size() == t.entries().size());
  for (const auto& [w, v] : t.entries()) CHECK(back.at(w) == v);
  auto broken = j;
  broken["eta"] = nullptr;
  CHECK_THROWS_AS(moment_table_from_json(broken), InvalidRequest);
}

TEST_CASE("closed forms are stable against a 256-bit reference") {
  for (double p : {-2.0 / 3.0, -0.75, -5.0 / 6.0}) {
    for (std::int64_t n : {1000LL, 100000LL, 10000000LL, 100000000LL}) {
      const auto config = SqueezingConfig::from_exponent(n, p);
      const Ref256 chi = pow(Ref256(n), Ref256(p));
      const auto ref = roat_moments_t<Ref256>(config, chi);
      const auto ext = roat_moments_t<Extended>(config, Extended(chi));
      const auto dbl = roat_moments(config);
      for (const auto& [w, v] : ref.entries()) {
        const double r = v.convert_to<double>();
        // Every entry is O(1) or O(N chi^2); absolute agreement is what matters
        // for the N^4-weighted combinations downstream.
        CHECK(std::abs(to_double(ext.at(w)) - r) < 1e-30 + 1e-16 * std::abs(r));
        CHECK(std::abs(dbl.at(w) - r) < 1e-13);
      }
      // Entries driving Var(J_y): relative accuracy of the small ROAT yy.
      const double yy_ref = ref.at("yy").convert_to<double>();
      CHECK(std::abs(to_double(ext.at("yy")) - yy_ref) <= 1e-12 * std::abs(yy_ref));
    }
  }
}

TEST_CASE("gaussian property diagnostic stays bounded") {
  const auto checks = gaussian_property_diagnostic({1000, 100000, 10000000}, -0.75);
  CHECK(checks.size() == 6);
  for (const auto& c : checks) {
    CHECK(std::isfinite(c.fitted_constant));
    CHECK(c.fitted_constant < 10.0);
  }
}
