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

// Exact permutation-invariant Pauli moments (up to four sites) of the
// one-axis-twisted state, its rotated (ROAT) version, and the state after
// N parallel uses of the dephasing channel.
//
// Everything that feeds the large-N pipeline is templated on the scalar so
// that the same code runs in double and in Extended precision.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "twistsense/channel.hpp"
#include "twistsense/numeric.hpp"

namespace twistsense {

/// Multiset of 1..4 Pauli labels acting on distinct, unspecified sites.
/// Stored in canonical sorted order (x < y < z).
class PauliWord {
 public:
  static constexpr std::size_t kMaxLength = 4;

  PauliWord() = default;
  explicit PauliWord(std::string_view labels);
  template <class It>
  PauliWord(It first, It last) {
    for (; first != last; ++first) push(*first);
    canonicalize();
  }

  std::size_t size() const { return size_; }
  Axis operator[](std::size_t i) const { return axes_[i]; }
  int count(Axis a) const;
  /// True when the number of y and z labels together is odd.
  bool odd_yz() const { return (count(Axis::Y) + count(Axis::Z)) % 2 == 1; }
  std::string str() const;

  friend bool operator==(const PauliWord& a, const PauliWord& b) {
    return a.size_ == b.size_ && a.axes_ == b.axes_;
  }
  friend bool operator<(const PauliWord& a, const PauliWord& b) {
    if (a.size_ != b.size_) return a.size_ < b.size_;
    return a.axes_ < b.axes_;
  }

 private:
  void push(Axis a);
  void canonicalize();

  std::array<Axis, kMaxLength> axes_{Axis::X, Axis::X, Axis::X, Axis::X};
  std::size_t size_ = 0;
};

/// All canonical words of length 1..max_length (3, 6, 10, 15 per length).
std::vector<PauliWord> all_words(std::size_t max_length);

/// (N, chi), optionally derived from chi = N^p, plus the ROAT angle epsilon.
class SqueezingConfig {
 public:
  static SqueezingConfig from_chi(std::int64_t n, double chi);
  /// p = -infinity encodes chi = 0.
  static SqueezingConfig from_exponent(std::int64_t n, double p);

  std::int64_t n() const { return n_; }
  double chi() const { return chi_; }
  std::optional<double> p() const { return p_; }
  double epsilon() const { return epsilon_; }

 private:
  SqueezingConfig(std::int64_t n, double chi, std::optional<double> p);

  std::int64_t n_;
  double chi_;
  std::optional<double> p_;
  double epsilon_;
};

enum class Frame { Oat, Roat, Output };

std::string frame_name(Frame f);
Frame frame_from_name(std::string_view name);

template <class Real>
class BasicMomentTable {
 public:
  BasicMomentTable(Frame frame, SqueezingConfig config, std::optional<ChannelParams> params = std::nullopt)
      : frame_(frame), config_(config), params_(params) {}

  Frame frame() const { return frame_; }
  const SqueezingConfig& config() const { return config_; }
  const std::optional<ChannelParams>& params() const { return params_; }

  void set(const PauliWord& w, Real value) { entries_[w] = std::move(value); }
  bool contains(const PauliWord& w) const { return entries_.count(w) != 0; }
  const Real& at(const PauliWord& w) const {
    auto it = entries_.find(w);
    if (it == entries_.end())
      throw IncompleteTableError(frame_name(frame_) + " table has no entry for '" + w.str() + "'");
    return it->second;
  }
  const Real& at(std::string_view labels) const { return at(PauliWord(labels)); }
  const std::map<PauliWord, Real>& entries() const { return entries_; }

 private:
  Frame frame_;
  SqueezingConfig config_;
  std::optional<ChannelParams> params_;
  std::map<PauliWord, Real> entries_;
};

using MomentTable = BasicMomentTable<double>;

// ---------------------------------------------------------------------------
// Rotation angle

/// eps = atan(4 sin(chi) cos^{N-2}(chi) / (1 - cos^{N-2}(2chi))) / 2, taken by
/// continuity at the 0/0 (chi = 0) and x/0 (N = 2) points.
template <class Real>
Real epsilon_angle_t(std::int64_t n, const Real& chi) {
  using std::atan2;
  using std::sin;
  if (n < 2) throw InvalidRequest("epsilon_angle: n must be >= 2");
  if (chi == 0) return pi_v<Real>() / 4;
  const Real num = 4 * sin(chi) * cos_power(chi, n - 2);
  const Real den = one_minus_cos_power(Real(2 * chi), n - 2);
  return atan2(num, den) / 2;
}

double epsilon_angle(std::int64_t n, double chi);

// ---------------------------------------------------------------------------
// One-axis-twisted moments

/// Exact <word> on e^{-i chi J_z^2}|+>^N. Words with odd y+z count are 0.
template <class Real>
Real oat_moment_t(const PauliWord& word, std::int64_t n, const Real& chi) {
  using std::sin;
  if (word.size() == 0 || word.size() > PauliWord::kMaxLength)
    throw InvalidRequest("oat_moment: word length must be 1..4");
  if (static_cast<std::int64_t>(word.size()) > n)
    throw InvalidRequest("oat_moment: word '" + word.str() + "' longer than n = " + std::to_string(n));
  if (word.odd_yz()) return Real(0);

  const std::int64_t m = n - static_cast<std::int64_t>(word.size());
  const Real s1 = sin(chi);
  const Real c1 = cos_power(chi, m);
  auto cp = [&](int k) { return cos_power(Real(k * chi), m); };
  // sin(3chi) = 3 sin(chi) - 4 sin^3(chi)
  const Real s3 = 3 * s1 - 4 * s1 * s1 * s1;
  const Real s2 = sin(Real(2 * chi));

  const std::string w = word.str();
  if (w == "x") return c1;
  if (w == "xx") return (1 + cp(2)) / 2;
  if (w == "yy") return one_minus_cos_power(Real(2 * chi), m) / 2;
  if (w == "yz") return s1 * c1;
  if (w == "zz") return Real(0);
  if (w == "xxx") return (3 * c1 + cp(3)) / 4;
  if (w == "xyy") return (c1 - cp(3)) / 4;
  if (w == "xyz") return s2 * cp(2) / 2;
  if (w == "xzz") return -s1 * s1 * c1;
  if (w == "xxxx") return (3 + 4 * cp(2) + cp(4)) / 8;
  if (w == "xxyy") return one_minus_cos_power(Real(4 * chi), m) / 8;
  if (w == "xxyz") return (s1 * c1 + cp(3) * s3) / 4;
  if (w == "xxzz") return -s2 * s2 * cp(2) / 2;
  if (w == "yyyy") return (3 - 4 * cp(2) + cp(4)) / 8;
  if (w == "yyyz") return (3 * s1 * c1 - cp(3) * s3) / 4;
  if (w == "yyzz") return s2 * s2 * cp(2) / 2;
  if (w == "yzzz") return -s1 * s1 * s1 * c1;
  if (w == "zzzz") return Real(0);
  throw InvalidRequest("oat_moment: no closed form for '" + w + "'");
}

double oat_moment(const PauliWord& word, std::int64_t n, double chi);

/// Complete OAT table: every canonical word up to min(n, 4) sites.
template <class Real>
BasicMomentTable<Real> oat_moments_t(const SqueezingConfig& config, const Real& chi) {
  BasicMomentTable<Real> table(Frame::Oat, config);
  const auto max_len = static_cast<std::size_t>(std::min<std::int64_t>(config.n(), 4));
  for (const auto& w : all_words(max_len)) table.set(w, oat_moment_t<Real>(w, config.n(), chi));
  return table;
}

MomentTable oat_moments(const SqueezingConfig& config);

// ---------------------------------------------------------------------------
// Multilinear substitution

namespace detail {

template <class Real>
using Substitution = std::array<std::vector<std::pair<Axis, Real>>, 3>;

/// Expands every label of `word` through `sub` and contracts against `source`.
template <class Real>
Real substitute(const PauliWord& word, const Substitution<Real>& sub, const BasicMomentTable<Real>& source) {
  std::vector<std::pair<std::vector<Axis>, Real>> terms{{{}, Real(1)}};
  for (std::size_t k = 0; k < word.size(); ++k) {
    std::vector<std::pair<std::vector<Axis>, Real>> next;
    for (const auto& [axes, coef] : terms) {
      for (const auto& [target, weight] : sub[static_cast<int>(word[k])]) {
        auto extended = axes;
        extended.push_back(target);
        next.emplace_back(std::move(extended), coef * weight);
      }
    }
    terms = std::move(next);
  }
  Real total(0);
  for (const auto& [axes, coef] : terms) total += coef * source.at(PauliWord(axes.begin(), axes.end()));
  return total;
}

template <class Real>
BasicMomentTable<Real> rotate_about_x(const BasicMomentTable<Real>& table, const Real& c, const Real& s,
                                      Frame result_frame) {
  // Heisenberg image of e^{i theta J_x}: y -> c y + s z, z -> c z - s y.
  Substitution<Real> sub;
  sub[0] = {{Axis::X, Real(1)}};
  sub[1] = {{Axis::Y, c}, {Axis::Z, s}};
  sub[2] = {{Axis::Z, c}, {Axis::Y, Real(-s)}};
  BasicMomentTable<Real> out(result_frame, table.config(), table.params());
  for (const auto& [w, value] : table.entries()) out.set(w, substitute(w, sub, table));
  return out;
}

}  // namespace detail

/// Rotates an OAT-frame table by e^{i theta J_x} applied to the state.
MomentTable rotate_moments(const MomentTable& table, double theta);

// ---------------------------------------------------------------------------
// ROAT and output frames

/// ROAT table: OAT rotated by eps + pi/2, with chi = 0 special-cased to the
/// product-state table.
template <class Real>
BasicMomentTable<Real> roat_moments_t(const SqueezingConfig& config, const Real& chi) {
  using std::cos;
  using std::sin;
  const auto max_len = static_cast<std::size_t>(std::min<std::int64_t>(config.n(), 4));
  if (chi == 0) {
    BasicMomentTable<Real> table(Frame::Roat, config);
    for (const auto& w : all_words(max_len))
      table.set(w, w.count(Axis::X) == static_cast<int>(w.size()) ? Real(1) : Real(0));
    return table;
  }
  const Real eps = epsilon_angle_t<Real>(config.n(), chi);
  // cos(eps + pi/2) = -sin(eps), sin(eps + pi/2) = cos(eps)
  return detail::rotate_about_x(oat_moments_t<Real>(config, chi), Real(-sin(eps)), Real(cos(eps)), Frame::Roat);
}

MomentTable roat_moments(const SqueezingConfig& config);

/// Moments on Lambda^{(x)N}(|Psi><Psi|), obtained by substituting each
/// label with its dual-channel image.
template <class Real>
BasicMomentTable<Real> output_moments_t(const BasicMomentTable<Real>& roat, const ChannelParams& params) {
  using std::cos;
  using std::sin;
  if (roat.frame() != Frame::Roat) throw InvalidRequest("output_moments expects a ROAT-frame table");
  const Real eta(params.eta());
  const Real phi(params.phi());
  const Real c = cos(phi);
  const Real s = sin(phi);
  detail::Substitution<Real> sub;
  sub[0] = {{Axis::X, Real(eta * c)}, {Axis::Y, Real(-eta * s)}};
  sub[1] = {{Axis::X, Real(eta * s)}, {Axis::Y, Real(eta * c)}};
  sub[2] = {{Axis::Z, Real(1)}};
  BasicMomentTable<Real> out(Frame::Output, roat.config(), params);
  for (const auto& [w, value] : roat.entries()) out.set(w, detail::substitute(w, sub, roat));
  return out;
}

MomentTable output_moments(const MomentTable& roat, const ChannelParams& params);

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const MomentTable& table);
MomentTable moment_table_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Asymptotic diagnostics (never used by the main computation)

/// Leading asymptotic form of selected ROAT moments for chi = N^p, p in (-1, -1/2).
std::optional<double> roat_leading_term(const PauliWord& word, std::int64_t n, double chi);

struct GaussianCheck {
  Axis i;
  Axis j;
  double fitted_constant;  // max over grid of |<iijj> - <ii><jj>| / (N^2 chi^4)
};

/// Gaussian-factorization defect of ROAT fourth moments along chi = N^p.
std::vector<GaussianCheck> gaussian_property_diagnostic(const std::vector<std::int64_t>& n_grid, double p);

}  // namespace twistsense
