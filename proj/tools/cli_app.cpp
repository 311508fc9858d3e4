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

#include "cli_app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "twistsense/estimation.hpp"
#include "twistsense/oracle.hpp"
#include "twistsense/validation.hpp"

namespace twistsense::cli {

namespace {

std::int64_t parse_count(const std::string& text, const char* name) {
  double v = 0.0;
  try {
    std::size_t used = 0;
    v = std::stod(text, &used);
    if (used != text.size()) throw InvalidRequest("");
  } catch (const std::exception&) {
    throw InvalidRequest(std::string(name) + ": cannot parse '" + text + "'");
  }
  if (!std::isfinite(v) || v < 1 || v > 9e15 || v != std::floor(v))
    throw InvalidRequest(std::string(name) + " must be a positive integer, got '" + text + "'");
  return static_cast<std::int64_t>(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

Precision parse_precision(const std::string& s) {
  if (s == "auto") return Precision::Auto;
  if (s == "double") return Precision::Double;
  if (s == "extended") return Precision::Extended;
  throw InvalidRequest("unknown precision '" + s + "'");
}

oracle::OraclePath parse_path(const std::string& s) {
  if (s == "auto") return oracle::OraclePath::Auto;
  if (s == "density") return oracle::OraclePath::Density;
  if (s == "trajectory") return oracle::OraclePath::Trajectory;
  throw InvalidRequest("unknown oracle path '" + s + "'");
}

void emit(const std::string& text, const std::string& output, std::ostream& out) {
  if (output.empty()) {
    out << text;
    return;
  }
  std::filesystem::path path(output);
  if (path.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) path = std::filesystem::path(dir) / path;
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + path.string());
  f << text;
}

struct SqueezingArgs {
  std::string n = "";
  std::optional<double> chi;
  std::optional<std::string> p;

  void add(CLI::App* cmd) {
    cmd->add_option("--n", n, "Number of qubits (accepts 1e8 notation)")->required();
    auto* c = cmd->add_option("--chi", chi, "Twisting strength chi in [0, pi/2)");
    auto* e = cmd->add_option("--p", p, "Exponent p with chi = N^p; 'inf' means chi = 0; fractions like -5/6 allowed");
    c->excludes(e);
    e->excludes(c);
  }

  SqueezingConfig config() const {
    const auto count = parse_count(n, "--n");
    if (chi) return SqueezingConfig::from_chi(count, *chi);
    if (p) return SqueezingConfig::from_exponent(count, ExponentSpec::parse(*p).p);
    throw InvalidRequest("one of --chi or --p is required");
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint phase and dephasing estimation with one-axis-twisted states", "twistsense"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string output;
  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("--output,-o", output,
                    std::string("Output file (default stdout); relative paths resolve against $") + kOutputDirEnv);
  };

  // protocol
  auto* protocol = app.add_subcommand("protocol", "Closed-form protocol report at phi = 0 (JSON)");
  SqueezingArgs protocol_sq;
  protocol_sq.add(protocol);
  double protocol_eta = 0.8;
  std::string protocol_precision = "auto";
  protocol->add_option("--eta", protocol_eta, "Dephasing strength in [0, 1]")->required();
  protocol->add_option("--precision", protocol_precision, "auto, double or extended")
      ->check(CLI::IsMember({"auto", "double", "extended"}));
  add_output(protocol);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Normalized variance sweep over N (CSV)");
  double sweep_eta = 0.8;
  std::string sweep_p = "inf:-2/3:-3/4:-5/6";
  std::string n_min = "100", n_max = "1e8";
  int points = 61;
  sweep_cmd->add_option("--eta", sweep_eta, "Dephasing strength in [0, 1]")->capture_default_str();
  sweep_cmd->add_option("--p", sweep_p, "Colon-separated exponents; 'inf' means chi = 0")->capture_default_str();
  sweep_cmd->add_option("--n-min", n_min, "Smallest N")->capture_default_str();
  sweep_cmd->add_option("--n-max", n_max, "Largest N")->capture_default_str();
  sweep_cmd->add_option("--points", points, "Log-spaced grid points")->capture_default_str()->check(CLI::Range(1, 100000));
  add_output(sweep_cmd);

  // validate
  auto* validate = app.add_subcommand("validate", "Closed forms against the brute-force oracle (JSON)");
  ValidationOptions vopt;
  std::vector<std::string> corrupt;
  validate->add_option("--n-max", vopt.n_max, "Largest oracle size, 4..12")->capture_default_str()->check(CLI::Range(4, 12));
  validate->add_option("--tol", vopt.tol, "Moment-equivalence tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  validate->add_option("--density-n-cap", vopt.density_n_cap, "Largest N for density-matrix checks")->capture_default_str()
      ->check(CLI::Range(4, 12));
  validate->add_option("--corrupt-moment", corrupt, "WORD=DELTA added to an OAT closed form (harness self-test)")
      ->group("");
  add_output(validate);

  // sample
  auto* sample = app.add_subcommand("sample", "Monte-Carlo estimator experiment on the oracle (JSON)");
  int sample_n = 8;
  double sample_chi = 0.2, sample_eta = 0.8, sample_phi = 0.05;
  std::string shots = "1e5", reps = "200", path = "auto";
  std::uint64_t seed = 42;
  sample->add_option("--n", sample_n, "Number of qubits (<= 12 density, <= 16 trajectory)")->capture_default_str()
      ->check(CLI::Range(2, oracle::kMaxTrajectoryQubits));
  sample->add_option("--chi", sample_chi, "Twisting strength")->capture_default_str();
  sample->add_option("--eta", sample_eta, "Dephasing strength")->capture_default_str();
  sample->add_option("--phi", sample_phi, "Phase")->capture_default_str();
  sample->add_option("--shots", shots, "Shots per experiment")->capture_default_str();
  sample->add_option("--reps", reps, "Independent experiments")->capture_default_str();
  sample->add_option("--seed", seed, "Philox4x32-10 key")->capture_default_str();
  sample->add_option("--path", path, "auto, density or trajectory")->capture_default_str()
      ->check(CLI::IsMember({"auto", "density", "trajectory"}));
  add_output(sample);

  // moments
  auto* moments = app.add_subcommand("moments", "Closed-form Pauli moment table (JSON or CSV)");
  SqueezingArgs moments_sq;
  moments_sq.add(moments);
  std::string frame = "roat", format = "json";
  std::optional<double> m_eta, m_phi;
  moments->add_option("--frame", frame, "oat, roat or output")->capture_default_str()->check(CLI::IsMember({"oat", "roat", "output"}));
  moments->add_option("--eta", m_eta, "Dephasing strength (output frame)");
  moments->add_option("--phi", m_phi, "Phase (output frame)");
  moments->add_option("--format", format, "json or csv")->capture_default_str()->check(CLI::IsMember({"json", "csv"}));
  add_output(moments);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (protocol->parsed()) {
      const auto report = evaluate_protocol(protocol_sq.config(), protocol_eta, parse_precision(protocol_precision));
      emit(to_json(report).dump(2) + "\n", output, out);
    } else if (sweep_cmd->parsed()) {
      std::vector<ExponentSpec> specs;
      for (const auto& token : split(sweep_p, ':')) specs.push_back(ExponentSpec::parse(token));
      if (specs.empty()) throw InvalidRequest("--p list is empty");
      const auto grid = log_spaced_grid(parse_count(n_min, "--n-min"), parse_count(n_max, "--n-max"), points);
      std::ostringstream csv;
      write_sweep_csv(csv, sweep(sweep_eta, specs, grid));
      emit(csv.str(), output, out);
    } else if (validate->parsed()) {
      for (const auto& c : corrupt) {
        const auto eq = c.find('=');
        if (eq == std::string::npos) throw InvalidRequest("--corrupt-moment expects WORD=DELTA");
        vopt.moment_perturbation[PauliWord(c.substr(0, eq)).str()] = std::stod(c.substr(eq + 1));
      }
      const auto summary = run_validation(vopt);
      emit(summary.to_json().dump(2) + "\n", output, out);
      if (!summary.passed()) {
        err << "validation failed:";
        for (const auto& name : summary.failed_names()) err << ' ' << name;
        err << '\n';
        return kExitValidationFailure;
      }
    } else if (sample->parsed()) {
      const auto config = SqueezingConfig::from_chi(sample_n, sample_chi);
      const auto result = oracle::mc_experiment(config, ChannelParams(sample_eta, sample_phi),
                                                parse_count(shots, "--shots"), parse_count(reps, "--reps"), seed,
                                                parse_path(path));
      emit(oracle::to_json(result).dump(2) + "\n", output, out);
    } else if (moments->parsed()) {
      const auto config = moments_sq.config();
      MomentTable table = frame == "oat" ? oat_moments(config) : roat_moments(config);
      if (frame == "output") {
        if (!m_eta || !m_phi) throw InvalidRequest("--frame output requires --eta and --phi");
        table = output_moments(table, ChannelParams(*m_eta, *m_phi));
      }
      if (format == "json") {
        emit(to_json(table).dump(2) + "\n", output, out);
      } else {
        std::ostringstream csv;
        csv << "# " << kVersion << "; frame=" << frame_name(table.frame()) << "; n=" << config.n() << '\n';
        csv << "word,value\n";
        char buf[32];
        for (const auto& [w, v] : table.entries()) {
          std::snprintf(buf, sizeof buf, "%.17g", v);
          csv << w.str() << ',' << buf << '\n';
        }
        emit(csv.str(), output, out);
      }
    }
  } catch (const InvalidRequest& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidationFailure;
  }
  return kExitOk;
}

}  // namespace twistsense::cli
