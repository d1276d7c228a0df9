// Command-line front end: scenario listing, condition checks, threshold
// search, curve sweeps and protocol simulation. Exit codes: 0 success (or
// condition holds), 1 condition fails, 2 error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adcert/csv.hpp"
#include "adcert/presets.hpp"
#include "adcert/protocol.hpp"
#include "adcert/security.hpp"
#include "adcert/thresholds.hpp"

namespace {

using namespace adcert;

std::vector<double> parse_grid(const std::string& spec) {
  // start:stop:count
  double start = 0.0, stop = 0.0;
  int count = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  if (!(in >> start >> c1 >> stop >> c2 >> count) || c1 != ':' || c2 != ':')
    throw std::invalid_argument("grid must be start:stop:count");
  if (count < 1) throw std::invalid_argument("grid count must be >= 1");
  std::vector<double> g;
  for (int i = 0; i < count; ++i)
    g.push_back(count == 1 ? start
                           : start + (stop - start) * i / (count - 1));
  return g;
}

struct Output {
  std::optional<std::string> path;
  std::string config_echo;

  void emit(const std::string& body) const {
    std::string text = config_echo + body;
    if (path) {
      std::ofstream out(*path);
      if (!out) throw std::runtime_error("cannot open output file: " + *path);
      out << text;
    }
    std::cout << text;
  }
};

Preset resolve_preset(const std::string& preset_name,
                      const std::string& scenario_file) {
  if (!scenario_file.empty()) return load_scenario_file(scenario_file);
  return find_preset(preset_name);
}

int cmd_scenarios(const std::string& detail_name) {
  auto presets = table_presets();
  if (!detail_name.empty()) {
    Preset p = find_preset(detail_name);
    std::cout << p.name << ": " << p.description << "\n"
              << "  inputs: " << p.scenario.num_inputs_a << " x "
              << p.scenario.num_inputs_b << "\n"
              << "  condition: " << to_string(p.condition) << "\n"
              << "  measurement angles A:";
    for (double t : p.angles_a) std::cout << " " << csv::num(t);
    std::cout << "\n  measurement angles B:";
    for (double t : p.angles_b) std::cout << " " << csv::num(t);
    std::cout << "\n  chsh terms:";
    for (const auto& t : p.chsh)
      std::cout << " " << (t.sign >= 0 ? "+" : "-") << "E(" << t.x << ","
                << t.y << ")";
    std::cout << "\n  reference thresholds: q ~ " << p.paper_q_percent
              << "%, eta ~ " << p.paper_eta_percent << "%\n";
    return 0;
  }
  std::cout << "name,inputs,condition,ref_q_percent,ref_eta_percent,"
               "description\n";
  for (const Preset& p : presets)
    std::cout << p.name << "," << p.scenario.num_inputs_a << "x"
              << p.scenario.num_inputs_b << "," << to_string(p.condition)
              << "," << p.paper_q_percent << "," << p.paper_eta_percent << ","
              << p.description << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certification toolkit for repetition-code advantage "
               "distillation in device-independent QKD"};
  app.require_subcommand(1);

  std::string preset_name = "row-iv";
  std::string scenario_file;
  std::string level_text = "2";
  std::string grid_spec;
  std::string out_path;
  std::string family_text = "depolarizing";
  double q = 0.0, eta = 1.0, tol = 1e-4, fixed_q = 1e-3;
  double sim_eps = -1.0;
  int block_n = 1;
  std::uint64_t trials = 100000, seed = 1;
  double gap_tol = 1e-8, feas_tol = 1e-8;
  std::string detail_name;

  auto add_common = [&](CLI::App* sub, bool noise_flags) {
    sub->add_option("--preset", preset_name, "preset name (row-i .. row-vi)");
    sub->add_option("--scenario-file", scenario_file,
                    "JSON scenario file (overrides --preset)");
    sub->add_option("--level", level_text, "NPA level, e.g. 2, 3, 2+ABE");
    sub->add_option("--out", out_path, "output file (CSV)");
    if (noise_flags) {
      sub->add_option("--q", q, "depolarising noise in [0, 1/2]");
      sub->add_option("--eta", eta, "detection efficiency in [0, 1]");
    }
  };

  CLI::App* sc_list = app.add_subcommand("scenarios", "list built-in presets");
  sc_list->add_option("--preset", detail_name, "show one preset in detail");

  CLI::App* sc_check =
      app.add_subcommand("check", "check the security condition at one point");
  add_common(sc_check, true);

  CLI::App* sc_thresh =
      app.add_subcommand("threshold", "bisect for the noise threshold");
  add_common(sc_thresh, false);
  sc_thresh->add_option("--family", family_text,
                        "noise family: depolarizing | detection");
  sc_thresh->add_option("--tol", tol, "bisection bracket tolerance");
  sc_thresh->add_option(
      "--q", fixed_q, "fixed depolarising admixture for the detection family");

  CLI::App* sc_curve =
      app.add_subcommand("curve", "sweep the condition over a noise grid");
  add_common(sc_curve, false);
  sc_curve->add_option("--family", family_text,
                       "noise family: depolarizing | detection");
  sc_curve->add_option("--grid", grid_spec, "noise grid start:stop:count")
      ->required();
  sc_curve->add_option(
      "--q", fixed_q, "fixed depolarising admixture for the detection family");

  CLI::App* sc_sim =
      app.add_subcommand("simulate", "Monte Carlo of the repetition code");
  sc_sim->add_option("--epsilon", sim_eps,
                     "channel error rate (otherwise taken from preset+noise)");
  sc_sim->add_option("--preset", preset_name, "preset name");
  sc_sim->add_option("--scenario-file", scenario_file, "JSON scenario file");
  sc_sim->add_option("--q", q, "depolarising noise for the preset pipeline");
  sc_sim->add_option("--eta", eta, "detection efficiency for the pipeline");
  sc_sim->add_option("--n", block_n, "repetition block size");
  sc_sim->add_option("--trials", trials, "number of Monte Carlo trials");
  sc_sim->add_option("--seed", seed, "PRNG master seed (splitmix64)");
  sc_sim->add_option("--out", out_path, "output file (CSV)");

  CLI11_PARSE(app, argc, argv);

  try {
    sdp::SolveSettings settings;
    settings.gap_tol = gap_tol;
    settings.feas_tol = feas_tol;

    if (sc_list->parsed()) return cmd_scenarios(detail_name);

    if (sc_check->parsed()) {
      Preset preset = resolve_preset(preset_name, scenario_file);
      npa::NpaLevel level = npa::NpaLevel::parse(level_text);
      NoiseSpec noise{q, eta};
      ConditionReport rep = run_pipeline(preset, noise, level, settings);
      Output out{out_path.empty() ? std::nullopt
                                  : std::optional<std::string>(out_path),
                 "# check preset=" + preset.name + " q=" + csv::num(q) +
                     " eta=" + csv::num(eta) + " level=" + level.str() + "\n"};
      std::ostringstream body;
      csv::write_report(rep, body);
      out.emit(body.str());
      std::cout << (rep.holds ? "condition holds" : "condition fails")
                << " (margin " << csv::num(rep.margin) << ")\n";
      return rep.holds ? 0 : 1;
    }

    if (sc_thresh->parsed() || sc_curve->parsed()) {
      Preset preset = resolve_preset(preset_name, scenario_file);
      npa::NpaLevel level = npa::NpaLevel::parse(level_text);
      NoiseFamily family;
      if (family_text == "depolarizing") {
        family = NoiseFamily::kDepolarizing;
      } else if (family_text == "detection") {
        family = NoiseFamily::kDetection;
      } else {
        throw std::invalid_argument("unknown noise family '" + family_text +
                                    "'");
      }
      Output out{out_path.empty() ? std::nullopt
                                  : std::optional<std::string>(out_path),
                 ""};
      if (sc_thresh->parsed()) {
        ThresholdOptions opts;
        opts.tol = tol;
        opts.fixed_q = fixed_q;
        opts.sdp = settings;
        ThresholdResult res = find_threshold(preset, family, level, opts);
        std::ostringstream body;
        csv::write_threshold(res, body);
        body << "# bracket history (parameter, margin):\n";
        for (auto [param, margin] : res.history)
          body << "# " << csv::num(param) << " " << csv::num(margin) << "\n";
        out.emit(body.str());
        return 0;
      }
      std::vector<double> grid = parse_grid(grid_spec);
      CurveData data = sweep_curve(preset, family, grid, level, fixed_q,
                                   settings);
      std::ostringstream body;
      csv::write_curve(data, body);
      out.emit(body.str());
      return 0;
    }

    if (sc_sim->parsed()) {
      double eps = sim_eps;
      std::string source = "explicit";
      if (eps < 0.0) {
        Preset preset = resolve_preset(preset_name, scenario_file);
        NoiseSpec noise{q, eta};
        eps = key_error_rate(noisy_correlation(preset, noise));
        source = "preset " + preset.name + " q=" + csv::num(q) +
                 " eta=" + csv::num(eta);
      }
      protocol::ProtocolStats stats =
          protocol::simulate(eps, block_n, trials, seed);
      Output out{out_path.empty() ? std::nullopt
                                  : std::optional<std::string>(out_path),
                 "# simulate epsilon=" + csv::num(eps) + " (" + source +
                     ") n=" + std::to_string(block_n) + "\n"};
      std::ostringstream body;
      csv::write_stats(stats, body);
      body << "# analytic accept=" +
                  csv::num(protocol::analytic_accept_prob(eps, block_n)) +
                  " conditional_error=" +
                  csv::num(protocol::conditional_error(eps, block_n)) +
                  " entropy_term=" +
                  csv::num(protocol::classical_entropy_term(eps, block_n)) +
                  " rate_factor=" +
                  csv::num(protocol::rate_factor(eps, block_n)) + "\n";
      out.emit(body.str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
