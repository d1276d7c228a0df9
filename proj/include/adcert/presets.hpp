#pragma once

// The six built-in scenario presets and the JSON scenario-file format.
//
// A scenario file is a JSON object:
//   {
//     "state": "phi_plus" | {"partial": 0.6224} | {"hardy": 0.382}
//              | {"amplitudes": [a00, a01, a10, a11]},
//     "angles_a": [theta, ...],      // x-z plane angle per input, outcome 0
//     "angles_b": [theta, ...],      //   projects onto cos(t/2)|0>+sin(t/2)|1>
//     "chsh": [[x, y, sign], ...],   // four correlator terms
//     "condition": "theorem1" | "corollary3"
//   }

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "adcert/quantum.hpp"
#include "adcert/security.hpp"

namespace adcert {

struct Preset {
  std::string name;
  std::string description;
  Scenario scenario;
  VectorC state;
  std::vector<double> angles_a;
  std::vector<double> angles_b;
  ChshConvention chsh;
  Condition condition = Condition::kCorollary3;
  // Reference threshold values for the listing command (percent).
  double paper_q_percent = 0.0;
  double paper_eta_percent = 0.0;

  QuantumRealization realization() const {
    std::vector<MatrixC> pa, pb;
    for (double t : angles_a) pa.push_back(qubit_projector(t));
    for (double t : angles_b) pb.push_back(qubit_projector(t));
    return QuantumRealization::from_pure_state(state, 2, 2, std::move(pa),
                                               std::move(pb));
  }

  Correlation ideal_correlation() const {
    return born_probabilities(realization(), scenario);
  }
};

namespace detail {

inline double vector_angle(double c0, double c1) {
  return 2.0 * std::atan2(c1, c0);
}

}  // namespace detail

inline std::vector<Preset> table_presets() {
  constexpr double pi = std::numbers::pi;
  std::vector<Preset> out;

  {
    Preset p;
    p.name = "row-i";
    p.description =
        "Maximal CHSH with A0,A1,B1,B2; key pair A0=B0=Z (3 Bob inputs)";
    p.scenario = {2, 3, 0, 0};
    p.state = phi_plus();
    p.angles_a = {0.0, pi / 2};
    p.angles_b = {0.0, pi / 4, 3 * pi / 4};
    p.chsh = {{{0, 1, 1.0}, {0, 2, -1.0}, {1, 1, 1.0}, {1, 2, 1.0}}};
    p.condition = Condition::kTheorem1;
    p.paper_q_percent = 6.0;
    p.paper_eta_percent = 93.7;
    out.push_back(p);
  }
  {
    double kappa = (3.0 - std::sqrt(5.0)) / 2.0;
    Preset p;
    p.name = "row-ii";
    p.description =
        "Modified Hardy-paradox distribution, robust to limited detection";
    p.scenario = {3, 3, 0, 0};
    p.state = hardy_state(kappa);
    double t0 = detail::vector_angle(
        std::sqrt(1.0 + 2.0 * kappa) - std::sqrt(1.0 - 2.0 * kappa),
        2.0 * std::sqrt(kappa));
    double t1 = detail::vector_angle(0.37972, 0.92510);
    double t2 = detail::vector_angle(0.90821, 0.41851);
    p.angles_a = {t0, t1, t2};
    p.angles_b = {t0, t1, t2};
    p.chsh = {{{1, 1, 1.0}, {1, 2, 1.0}, {2, 1, 1.0}, {2, 2, -1.0}}};
    p.condition = Condition::kTheorem1;
    p.paper_q_percent = 3.2;
    p.paper_eta_percent = 92.0;
    out.push_back(p);
  }
  {
    Preset p;
    p.name = "row-iii";
    p.description = "Mayers-Yao self-test plus the CHSH measurements";
    p.scenario = {4, 4, 0, 0};
    p.state = phi_plus();
    p.angles_a = {0.0, pi / 4, pi / 2, 3 * pi / 4};
    p.angles_b = {0.0, pi / 4, pi / 2, 3 * pi / 4};
    p.chsh = {{{0, 1, 1.0}, {0, 3, -1.0}, {2, 1, 1.0}, {2, 3, 1.0}}};
    p.condition = Condition::kTheorem1;
    p.paper_q_percent = 6.8;
    p.paper_eta_percent = 92.7;
    out.push_back(p);
  }
  {
    Preset p;
    p.name = "row-iv";
    p.description = "Maximal CHSH with the key measurements themselves";
    p.scenario = {2, 2, 0, 0};
    p.state = phi_plus();
    p.angles_a = {0.0, pi / 2};
    p.angles_b = {pi / 4, 3 * pi / 4};
    p.chsh = {{{0, 0, 1.0}, {0, 1, -1.0}, {1, 0, 1.0}, {1, 1, 1.0}}};
    p.condition = Condition::kCorollary3;
    p.paper_q_percent = 7.7;
    p.paper_eta_percent = 91.7;
    out.push_back(p);
  }
  {
    Preset p;
    p.name = "row-v";
    p.description = "Measurements optimised for depolarising-noise robustness";
    p.scenario = {2, 2, 0, 0};
    p.state = phi_plus();
    p.angles_a = {0.4187, 1.7900};
    p.angles_b = {0.8636, 2.6340};
    p.chsh = {{{0, 0, 1.0}, {0, 1, -1.0}, {1, 0, 1.0}, {1, 1, 1.0}}};
    p.condition = Condition::kCorollary3;
    p.paper_q_percent = 9.1;
    p.paper_eta_percent = 90.0;
    out.push_back(p);
  }
  {
    Preset p;
    p.name = "row-vi";
    p.description =
        "Partially entangled state, CHSH optimised per detection efficiency";
    p.scenario = {2, 2, 0, 0};
    p.state = partially_entangled(0.6224);
    p.angles_a = {-0.35923, 1.1538};
    p.angles_b = {0.35923, -1.1538};
    p.chsh = {{{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, -1.0}}};
    p.condition = Condition::kCorollary3;
    p.paper_q_percent = 7.3;
    p.paper_eta_percent = 89.1;
    out.push_back(p);
  }
  return out;
}

inline Preset find_preset(const std::string& name) {
  for (const Preset& p : table_presets())
    if (p.name == name) return p;
  std::string known;
  for (const Preset& p : table_presets()) known += " " + p.name;
  throw std::invalid_argument("unknown preset '" + name + "'; known:" + known);
}

inline Preset parse_scenario_json(const nlohmann::json& j,
                                  const std::string& name) {
  Preset p;
  p.name = name;
  p.description = j.value("description", std::string("scenario file"));

  const auto& state = j.at("state");
  if (state.is_string()) {
    if (state.get<std::string>() != "phi_plus")
      throw std::invalid_argument("scenario file: unknown state preset '" +
                                  state.get<std::string>() + "'");
    p.state = phi_plus();
  } else if (state.contains("partial")) {
    p.state = partially_entangled(state.at("partial").get<double>());
  } else if (state.contains("hardy")) {
    p.state = hardy_state(state.at("hardy").get<double>());
  } else if (state.contains("amplitudes")) {
    auto amps = state.at("amplitudes").get<std::vector<double>>();
    if (amps.size() != 4)
      throw std::invalid_argument(
          "scenario file: amplitudes must list 4 entries");
    VectorC psi(4);
    for (int i = 0; i < 4; ++i) psi(i) = amps[static_cast<std::size_t>(i)];
    double norm = psi.norm();
    if (norm < 1e-12)
      throw std::invalid_argument("scenario file: zero state vector");
    p.state = psi / norm;
  } else {
    throw std::invalid_argument("scenario file: unrecognized state spec");
  }

  p.angles_a = j.at("angles_a").get<std::vector<double>>();
  p.angles_b = j.at("angles_b").get<std::vector<double>>();
  if (p.angles_a.empty() || p.angles_b.empty())
    throw std::invalid_argument("scenario file: empty angle list");
  p.scenario = {static_cast<int>(p.angles_a.size()),
                static_cast<int>(p.angles_b.size()), 0, 0};

  const auto& chsh = j.at("chsh");
  if (chsh.size() != 4)
    throw std::invalid_argument("scenario file: chsh must list 4 terms");
  for (int k = 0; k < 4; ++k) {
    const auto& t = chsh.at(static_cast<std::size_t>(k));
    p.chsh[static_cast<std::size_t>(k)] = {t.at(0).get<int>(),
                                           t.at(1).get<int>(),
                                           t.at(2).get<double>()};
  }

  std::string cond = j.value("condition", std::string("corollary3"));
  if (cond == "theorem1") {
    p.condition = Condition::kTheorem1;
  } else if (cond == "corollary3") {
    p.condition = Condition::kCorollary3;
  } else {
    throw std::invalid_argument("scenario file: unknown condition '" + cond +
                                "'");
  }
  return p;
}

inline Preset load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("scenario file parse error: " +
                             std::string(e.what()));
  }
  try {
    return parse_scenario_json(j, path);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("scenario file schema error: " +
                             std::string(e.what()));
  }
}

}  // namespace adcert
