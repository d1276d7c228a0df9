#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "adcert/csv.hpp"
#include "adcert/presets.hpp"
#include "adcert/thresholds.hpp"

using namespace adcert;

namespace {
const npa::NpaLevel kLevel2 = npa::NpaLevel::parse("2");
}

TEST_CASE("all six presets are listed with Table-1 parameters") {
  auto presets = table_presets();
  REQUIRE(presets.size() == 6);
  CHECK(presets[0].name == "row-i");
  CHECK(presets[5].name == "row-vi");
  // Frozen preset parameters.
  Preset v = find_preset("row-v");
  CHECK(v.angles_a[0] == 0.4187);
  CHECK(v.angles_a[1] == 1.7900);
  CHECK(v.angles_b[0] == 0.8636);
  CHECK(v.angles_b[1] == 2.6340);
  Preset vi = find_preset("row-vi");
  CHECK(vi.angles_a[0] == -0.35923);
  CHECK(vi.angles_a[1] == 1.1538);
  CHECK(vi.angles_b[0] == 0.35923);
  CHECK(vi.angles_b[1] == -1.1538);
  CHECK_THROWS_AS(find_preset("row-vii"), std::invalid_argument);
  // Every preset produces a valid ideal correlation.
  for (const Preset& p : presets) CHECK_NOTHROW(p.ideal_correlation());
}

TEST_CASE("margin at q = 1/2 is -1 for every preset") {
  for (const Preset& p : table_presets()) {
    NoiseSpec noise{0.5, 1.0};
    double m = condition_margin(p, noise, kLevel2);
    CHECK_THAT(m, Catch::Matchers::WithinAbs(-1.0, 1e-6));
  }
}

TEST_CASE("row-iv margin at q = 0 is roughly 1 - eps/(1-eps)") {
  Preset p = find_preset("row-iv");
  double m = condition_margin(p, NoiseSpec{0.0, 1.0}, kLevel2);
  CHECK_THAT(m, Catch::Matchers::WithinAbs(1.0 - 0.1716, 2e-3));
}

TEST_CASE("bisection rejects a bracket without a sign change") {
  Preset p = find_preset("row-iv");
  ThresholdOptions opts;
  opts.bracket_low = 0.2;
  opts.bracket_high = 0.25;  // condition fails on both endpoints
  CHECK_THROWS_AS(
      find_threshold(p, NoiseFamily::kDepolarizing, kLevel2, opts),
      std::runtime_error);
}

TEST_CASE("single-point sweep at q = 0 reports the Tsirelson CHSH value") {
  Preset p = find_preset("row-iv");
  CurveData data =
      sweep_curve(p, NoiseFamily::kDepolarizing, {0.0}, kLevel2);
  REQUIRE(data.points.size() == 1);
  CHECK_FALSE(data.points[0].failed);
  CHECK_THAT(data.points[0].chsh,
             Catch::Matchers::WithinAbs(2.0 * std::sqrt(2.0), 1e-9));
  CHECK_THAT(data.points[0].rhs,
             Catch::Matchers::WithinAbs(
                 data.points[0].epsilon / (1 - data.points[0].epsilon),
                 1e-12));
}

TEST_CASE("empty grid is rejected") {
  Preset p = find_preset("row-iv");
  CHECK_THROWS_AS(sweep_curve(p, NoiseFamily::kDepolarizing, {}, kLevel2),
                  std::invalid_argument);
}

TEST_CASE("curve CSV has the documented header and comment lines") {
  Preset p = find_preset("row-iv");
  CurveData data =
      sweep_curve(p, NoiseFamily::kDepolarizing, {0.0, 0.05}, kLevel2);
  std::ostringstream os;
  csv::write_curve(data, os);
  std::string text = os.str();
  CHECK(text.rfind("# preset=row-iv", 0) == 0);
  CHECK(text.find("noise,lhs,rhs,margin,chsh,epsilon,pg_bound,level,failed") !=
        std::string::npos);
}

TEST_CASE("scenario files round-trip a preset") {
  std::string path = "scenario_roundtrip.json";
  {
    std::ofstream out(path);
    out << R"({
      "state": "phi_plus",
      "angles_a": [0.0, 1.5707963267948966],
      "angles_b": [0.7853981633974483, 2.356194490192345],
      "chsh": [[0,0,1.0],[0,1,-1.0],[1,0,1.0],[1,1,1.0]],
      "condition": "corollary3"
    })";
  }
  Preset p = load_scenario_file(path);
  CHECK(p.scenario.num_inputs_a == 2);
  CHECK(p.condition == Condition::kCorollary3);
  Correlation c = p.ideal_correlation();
  CHECK_THAT(chsh_value(c, p.chsh),
             Catch::Matchers::WithinAbs(2.0 * std::sqrt(2.0), 1e-9));
  std::remove(path.c_str());

  std::string bad = "scenario_bad.json";
  {
    std::ofstream out(bad);
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_scenario_file(bad), std::runtime_error);
  std::remove(bad.c_str());
  CHECK_THROWS_AS(load_scenario_file("does_not_exist.json"),
                  std::runtime_error);
}

TEST_CASE("margin is monotone non-increasing in depolarising noise") {
  Preset p = find_preset("row-iv");
  std::vector<double> grid{0.0, 0.03, 0.06, 0.09, 0.12, 0.15};
  CurveData data =
      sweep_curve(p, NoiseFamily::kDepolarizing, grid, kLevel2);
  for (std::size_t i = 1; i < data.points.size(); ++i) {
    CHECK_FALSE(data.points[i].failed);
    // Depolarising mixes relax the constraint set, so Eve's bound and the
    // error rate both move against Alice and Bob; tolerance covers solver
    // noise near the extremal endpoint.
    CHECK(data.points[i].margin <= data.points[i - 1].margin + 1e-6);
  }
}
