#pragma once

// Converts certified SDP bounds on Eve's guessing probability into the
// security conditions: the fidelity condition F^2 > eps/(1-eps) via the
// Fuchs-van de Graaf bound F >= 1 - d, and its tighter two-input
// specialization 1 - d > eps/(1-eps).

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "adcert/correlation.hpp"
#include "adcert/npa.hpp"
#include "adcert/sdp.hpp"

namespace adcert {

enum class Condition { kTheorem1, kCorollary3 };

inline const char* to_string(Condition c) {
  return c == Condition::kTheorem1 ? "theorem1" : "corollary3";
}

struct ConditionReport {
  double epsilon = 0.0;   // key error rate
  double pg_bound = 0.0;  // certified upper bound on conditional P_g
  double d_bound = 0.0;   // upper bound on d(rho_E|00, rho_E|11)
  double f_bound = 0.0;   // lower bound on F(rho_E|00, rho_E|11)
  double lhs = 0.0;
  double rhs = 0.0;
  Condition condition = Condition::kCorollary3;
  bool holds = false;
  double margin = 0.0;
  bool d_clipped = false;  // solver tolerance pushed d above 1
  std::string npa_level;
  sdp::SolveStatus sdp_status = sdp::SolveStatus::kOptimal;
};

struct GuessingBound {
  double pg = 1.0;       // certified upper bound, normalized
  double raw_value = 0.0;
  sdp::SolveStatus status = sdp::SolveStatus::kNumericalFailure;
  bool clipped = false;
  bool extended_precision = false;  // rerun in long double after a stall
};

// Interior-restoring perturbation applied to the pinned moments before
// solving. 1e-9 costs O(sqrt(delta)) ~ 1e-4 of bound slack at extremal
// correlations and nothing measurable elsewhere.
inline constexpr double kDefaultPinSlack = 1e-9;

// Certified upper bound on Eve's probability of guessing the key bit,
// conditioned on Alice and Bob's outcomes being equal. Equal priors follow
// from symmetrisation. The bound is scored through npa::certified_value on
// the unperturbed instance, so neither the perturbation nor numerical error
// in the solver can understate Eve's power. If the double-precision solve
// stalls short of the tolerances (typical exactly at extremal correlations,
// where the optimum is unattained), the instance is re-solved in long double
// and the tighter of the two certificates is kept.
inline GuessingBound guessing_probability_bound(
    const Correlation& c, const Scenario& sc, const npa::NpaLevel& level,
    const sdp::SolveSettings& settings = {},
    double pin_slack = kDefaultPinSlack) {
  double eps = key_error_rate(c);
  if (!(eps < 0.5))
    throw std::invalid_argument("guessing_probability_bound: eps must be < 1/2");
  npa::MomentBasis basis = npa::generate_basis(sc, level);
  npa::MomentProblem mp = npa::build_guessing_problem(c, basis);
  npa::SdpTranslation exact = npa::to_sdp(mp);
  npa::SdpTranslation relaxed =
      npa::to_sdp(npa::perturb_pins(mp, pin_slack));

  GuessingBound gb;
  sdp::SdpSolution sol = sdp::solve(relaxed.problem, settings);
  gb.status = sol.status;
  double bound = npa::certified_value(exact, sol.x);
  if (sol.status != sdp::SolveStatus::kOptimal) {
    sdp::SolveSettings precise = settings;
    precise.precision = sdp::Precision::kLongDouble;
    sdp::SdpSolution sol2 = sdp::solve(relaxed.problem, precise);
    double bound2 = npa::certified_value(exact, sol2.x);
    gb.extended_precision = true;
    if (bound2 < bound) {
      bound = bound2;
      gb.status = sol2.status;
    }
  }
  if (!std::isfinite(bound))
    throw std::runtime_error(std::string("guessing-probability SDP: ") +
                             sdp::to_string(gb.status));
  gb.raw_value = bound;
  double pg = bound / (1.0 - eps);
  gb.clipped = pg > 1.0;
  gb.pg = std::clamp(pg, 0.5, 1.0);
  return gb;
}

// d(rho_E|00, rho_E|11) <= 2 P_g - 1, clipped to [0, 1].
inline double trace_distance_bound(const Correlation& c, const Scenario& sc,
                                   const npa::NpaLevel& level,
                                   const sdp::SolveSettings& settings = {}) {
  GuessingBound gb = guessing_probability_bound(c, sc, level, settings);
  return std::clamp(2.0 * gb.pg - 1.0, 0.0, 1.0);
}

namespace detail {

inline ConditionReport make_report(const Correlation& c, const Scenario& sc,
                                   const npa::NpaLevel& level,
                                   Condition condition,
                                   const sdp::SolveSettings& settings) {
  ConditionReport rep;
  rep.condition = condition;
  rep.npa_level = level.str();
  rep.epsilon = key_error_rate(c);
  if (rep.epsilon >= 0.5) {
    // Degenerate table: the key bits are uncorrelated, rhs = 1 and no
    // distinguishability bound can rescue the condition.
    rep.pg_bound = 1.0;
    rep.d_bound = 1.0;
    rep.f_bound = 0.0;
    rep.lhs = 0.0;
    rep.rhs = 1.0;
    rep.margin = -1.0;
    rep.holds = false;
    return rep;
  }
  GuessingBound gb = guessing_probability_bound(c, sc, level, settings);
  rep.pg_bound = gb.pg;
  rep.sdp_status = gb.status;
  rep.d_clipped = gb.clipped;
  rep.d_bound = std::clamp(2.0 * gb.pg - 1.0, 0.0, 1.0);
  rep.f_bound = std::max(0.0, 1.0 - rep.d_bound);
  rep.rhs = rep.epsilon / (1.0 - rep.epsilon);
  rep.lhs = condition == Condition::kTheorem1 ? rep.f_bound * rep.f_bound
                                              : 1.0 - rep.d_bound;
  rep.margin = rep.lhs - rep.rhs;
  rep.holds = rep.lhs > rep.rhs;
  return rep;
}

}  // namespace detail

// Fidelity condition F(rho_E|00, rho_E|11)^2 > eps/(1-eps), with F bounded
// through 1 - d. Valid for any input counts.
inline ConditionReport check_theorem1(const Correlation& c, const Scenario& sc,
                                      const npa::NpaLevel& level,
                                      const sdp::SolveSettings& settings = {}) {
  return detail::make_report(c, sc, level, Condition::kTheorem1, settings);
}

// Two-input two-output condition 1 - d > eps/(1-eps). Rejects scenarios with
// more than two inputs per side; those must use check_theorem1.
inline ConditionReport check_corollary3(const Correlation& c,
                                        const Scenario& sc,
                                        const npa::NpaLevel& level,
                                        const sdp::SolveSettings& settings = {}) {
  if (sc.num_inputs_a != 2 || sc.num_inputs_b != 2)
    throw std::invalid_argument(
        "check_corollary3: requires a 2-input/2-input scenario; use "
        "check_theorem1 instead");
  return detail::make_report(c, sc, level, Condition::kCorollary3, settings);
}

inline ConditionReport check_condition(const Correlation& c,
                                       const Scenario& sc,
                                       const npa::NpaLevel& level,
                                       Condition condition,
                                       const sdp::SolveSettings& settings = {}) {
  return condition == Condition::kTheorem1
             ? check_theorem1(c, sc, level, settings)
             : check_corollary3(c, sc, level, settings);
}

}  // namespace adcert
