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

#include "twistsense/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace twistsense {

void PauliWord::push(Axis a) {
  if (size_ >= kMaxLength) throw InvalidRequest("Pauli word longer than 4 sites");
  axes_[size_++] = a;
}

void PauliWord::canonicalize() { std::sort(axes_.begin(), axes_.begin() + static_cast<long>(size_)); }

PauliWord::PauliWord(std::string_view labels) {
  for (char c : labels) push(axis_from_label(c));
  canonicalize();
}

int PauliWord::count(Axis a) const {
  return static_cast<int>(std::count(axes_.begin(), axes_.begin() + static_cast<long>(size_), a));
}

std::string PauliWord::str() const {
  std::string out;
  for (std::size_t i = 0; i < size_; ++i) out.push_back(axis_label(axes_[i]));
  return out;
}

std::vector<PauliWord> all_words(std::size_t max_length) {
  std::vector<PauliWord> out;
  const std::string labels = "xyz";
  std::vector<int> idx;
  auto rec = [&](auto&& self, std::size_t len, int start) -> void {
    if (idx.size() == len) {
      std::string w;
      for (int k : idx) w.push_back(labels[static_cast<std::size_t>(k)]);
      out.emplace_back(w);
      return;
    }
    for (int k = start; k < 3; ++k) {
      idx.push_back(k);
      self(self, len, k);
      idx.pop_back();
    }
  };
  for (std::size_t len = 1; len <= std::min(max_length, PauliWord::kMaxLength); ++len) rec(rec, len, 0);
  return out;
}

SqueezingConfig::SqueezingConfig(std::int64_t n, double chi, std::optional<double> p) : n_(n), chi_(chi), p_(p) {
  if (n < 2) throw InvalidRequest("n must be >= 2, got " + std::to_string(n));
  if (!std::isfinite(chi) || chi < 0.0 || chi >= pi_v<double>() / 2)
    throw InvalidRequest("chi must lie in [0, pi/2), got " + std::to_string(chi));
  epsilon_ = epsilon_angle(n, chi);
}

SqueezingConfig SqueezingConfig::from_chi(std::int64_t n, double chi) { return SqueezingConfig(n, chi, std::nullopt); }

SqueezingConfig SqueezingConfig::from_exponent(std::int64_t n, double p) {
  if (std::isnan(p) || p > 0.0) throw InvalidRequest("exponent p must be <= 0");
  if (n < 2) throw InvalidRequest("n must be >= 2, got " + std::to_string(n));
  const double chi = std::isinf(p) ? 0.0 : std::pow(static_cast<double>(n), p);
  return SqueezingConfig(n, chi, p);
}

std::string frame_name(Frame f) {
  switch (f) {
    case Frame::Oat: return "OAT";
    case Frame::Roat: return "ROAT";
    case Frame::Output: return "OUTPUT";
  }
  return "?";
}

Frame frame_from_name(std::string_view name) {
  if (name == "OAT" || name == "oat") return Frame::Oat;
  if (name == "ROAT" || name == "roat") return Frame::Roat;
  if (name == "OUTPUT" || name == "output") return Frame::Output;
  throw InvalidRequest("unknown frame '" + std::string(name) + "'");
}

double epsilon_angle(std::int64_t n, double chi) {
  if (!std::isfinite(chi) || chi < 0.0 || chi >= pi_v<double>() / 2)
    throw InvalidRequest("epsilon_angle: chi must lie in [0, pi/2)");
  return epsilon_angle_t<double>(n, chi);
}

double oat_moment(const PauliWord& word, std::int64_t n, double chi) { return oat_moment_t<double>(word, n, chi); }

MomentTable oat_moments(const SqueezingConfig& config) { return oat_moments_t<double>(config, config.chi()); }

MomentTable rotate_moments(const MomentTable& table, double theta) {
  if (table.frame() != Frame::Oat) throw InvalidRequest("rotate_moments expects an OAT-frame table");
  return detail::rotate_about_x<double>(table, std::cos(theta), std::sin(theta), Frame::Roat);
}

MomentTable roat_moments(const SqueezingConfig& config) { return roat_moments_t<double>(config, config.chi()); }

MomentTable output_moments(const MomentTable& roat, const ChannelParams& params) {
  return output_moments_t<double>(roat, params);
}

nlohmann::json to_json(const MomentTable& table) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["frame"] = frame_name(table.frame());
  j["n"] = table.config().n();
  j["chi"] = table.config().chi();
  if (table.params()) {
    j["eta"] = table.params()->eta();
    j["phi"] = table.params()->phi();
  } else {
    j["eta"] = nullptr;
    j["phi"] = nullptr;
  }
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [w, value] : table.entries()) entries.push_back({{"word", w.str()}, {"value", value}});
  j["entries"] = entries;
  return j;
}

MomentTable moment_table_from_json(const nlohmann::json& j) {
  const Frame frame = frame_from_name(j.at("frame").get<std::string>());
  const auto config = SqueezingConfig::from_chi(j.at("n").get<std::int64_t>(), j.at("chi").get<double>());
  std::optional<ChannelParams> params;
  if (j.contains("eta") && !j.at("eta").is_null())
    params = ChannelParams(j.at("eta").get<double>(), j.at("phi").get<double>());
  if (frame == Frame::Output && !params) throw InvalidRequest("OUTPUT-frame table requires eta and phi");
  MomentTable table(frame, config, params);
  for (const auto& e : j.at("entries")) table.set(PauliWord(e.at("word").get<std::string>()), e.at("value").get<double>());
  return table;
}

std::optional<double> roat_leading_term(const PauliWord& word, std::int64_t n, double chi) {
  const double nn = static_cast<double>(n);
  const double nc2 = nn * chi * chi;
  const std::string w = word.str();
  if (w == "x") return 1.0 - nc2 / 2.0;
  if (w == "xx") return 1.0 - nc2;
  if (w == "xxx") return 1.0 - 1.5 * nc2;
  if (w == "xxxx") return 1.0 - 2.0 * nc2;
  if (w == "yy" || w == "xyy" || w == "xxyy") return -1.0 / nn;
  if (w == "zz" || w == "xzz" || w == "xxzz") return nc2 + 1.0 / nn;
  if (w == "yz") return 0.0;
  return std::nullopt;
}

std::vector<GaussianCheck> gaussian_property_diagnostic(const std::vector<std::int64_t>& n_grid, double p) {
  const Axis axes[] = {Axis::X, Axis::Y, Axis::Z};
  std::vector<GaussianCheck> out;
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) out.push_back({axes[a], axes[b], 0.0});
  for (std::int64_t n : n_grid) {
    if (n < 4) throw InvalidRequest("gaussian_property_diagnostic needs n >= 4");
    const auto config = SqueezingConfig::from_exponent(n, p);
    const Extended chi = pow(Extended(n), Extended(p));
    const auto roat = roat_moments_t<Extended>(config, chi);
    const Extended scale = Extended(n) * Extended(n) * chi * chi * chi * chi;
    for (auto& check : out) {
      const std::array<Axis, 4> w4{check.i, check.i, check.j, check.j};
      const std::array<Axis, 2> wi{check.i, check.i};
      const std::array<Axis, 2> wj{check.j, check.j};
      const Extended defect = roat.at(PauliWord(w4.begin(), w4.end())) -
                              roat.at(PauliWord(wi.begin(), wi.end())) * roat.at(PauliWord(wj.begin(), wj.end()));
      check.fitted_constant = std::max(check.fitted_constant, to_double(Extended(abs(defect) / scale)));
    }
  }
  return out;
}

}  // namespace twistsense
