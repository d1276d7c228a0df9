#pragma once

// Noise-parameter sweeps and bisection for the certified thresholds: the
// maximum depolarising noise q and minimum detection efficiency eta at which
// the preset's security condition still holds.

#include <cmath>
#include <functional>
#include <future>
#include <stdexcept>
#include <string>
#include <vector>

#include "adcert/presets.hpp"
#include "adcert/security.hpp"

namespace adcert {

enum class NoiseFamily { kDepolarizing, kDetection };

inline const char* to_string(NoiseFamily f) {
  return f == NoiseFamily::kDepolarizing ? "depolarizing" : "detection";
}

struct NoiseSpec {
  double depolarizing_q = 0.0;
  double detection_eta = 1.0;

  void validate() const {
    if (!(depolarizing_q >= 0.0 && depolarizing_q <= 0.5))
      throw std::invalid_argument("NoiseSpec: q must lie in [0, 1/2]");
    if (!(detection_eta >= 0.0 && detection_eta <= 1.0))
      throw std::invalid_argument("NoiseSpec: eta must lie in [0, 1]");
  }
};

// born -> depolarising -> detection -> symmetrize. Order fixed.
inline Correlation noisy_correlation(const Preset& preset,
                                     const NoiseSpec& noise) {
  noise.validate();
  Correlation c = preset.ideal_correlation();
  c = apply_depolarizing(c, noise.depolarizing_q);
  c = apply_detection(c, noise.detection_eta);
  return symmetrize(c);
}

inline ConditionReport run_pipeline(const Preset& preset,
                                    const NoiseSpec& noise,
                                    const npa::NpaLevel& level,
                                    const sdp::SolveSettings& settings = {}) {
  Correlation c = noisy_correlation(preset, noise);
  return check_condition(c, preset.scenario, level, preset.condition,
                         settings);
}

// lhs - rhs of the preset's condition under the given noise.
inline double condition_margin(const Preset& preset, const NoiseSpec& noise,
                               const npa::NpaLevel& level,
                               const sdp::SolveSettings& settings = {}) {
  return run_pipeline(preset, noise, level, settings).margin;
}

struct ThresholdResult {
  std::string preset_name;
  NoiseFamily family = NoiseFamily::kDepolarizing;
  double fixed_q = 0.0;  // depolarising admixture for the detection family
  double threshold = 0.0;
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  int iterations = 0;
  std::string npa_level;
  std::vector<std::pair<double, double>> history;  // (parameter, margin)
};

struct ThresholdOptions {
  double tol = 1e-4;
  double bracket_low = 0.0;   // 0 means family default
  double bracket_high = 0.0;
  double fixed_q = 1e-3;      // detection family: depolarising admixture
  sdp::SolveSettings sdp;
};

// Bisection on the noise parameter. The margin must change sign across the
// initial bracket; each evaluation is a full SDP solve, so no root polishing.
inline ThresholdResult find_threshold(const Preset& preset, NoiseFamily family,
                                      const npa::NpaLevel& level,
                                      const ThresholdOptions& opts = {}) {
  double lo = opts.bracket_low, hi = opts.bracket_high;
  if (lo == 0.0 && hi == 0.0) {
    if (family == NoiseFamily::kDepolarizing) {
      lo = 0.0;
      hi = 0.25;
    } else {
      lo = 0.8;
      hi = 1.0;
    }
  }
  auto margin_at = [&](double param) {
    NoiseSpec noise;
    if (family == NoiseFamily::kDepolarizing) {
      noise.depolarizing_q = param;
    } else {
      noise.depolarizing_q = opts.fixed_q;
      noise.detection_eta = param;
    }
    return condition_margin(preset, noise, level, opts.sdp);
  };

  ThresholdResult res;
  res.preset_name = preset.name;
  res.family = family;
  res.fixed_q = family == NoiseFamily::kDetection ? opts.fixed_q : 0.0;
  res.npa_level = level.str();
  res.bracket_low = lo;
  res.bracket_high = hi;

  double m_lo = margin_at(lo);
  double m_hi = margin_at(hi);
  res.history.push_back({lo, m_lo});
  res.history.push_back({hi, m_hi});
  // The secure endpoint is low noise: q = lo, or eta = hi.
  double secure = family == NoiseFamily::kDepolarizing ? m_lo : m_hi;
  double insecure = family == NoiseFamily::kDepolarizing ? m_hi : m_lo;
  if (!(secure > 0.0) || !(insecure <= 0.0))
    throw std::runtime_error(
        "find_threshold: condition " +
        std::string(secure > 0.0 ? "fails" : "holds") +
        " on the entire bracket [" + std::to_string(lo) + ", " +
        std::to_string(hi) + "]");

  while (hi - lo > opts.tol) {
    double mid = 0.5 * (lo + hi);
    double m_mid = margin_at(mid);
    res.history.push_back({mid, m_mid});
    ++res.iterations;
    bool mid_secure = m_mid > 0.0;
    if (family == NoiseFamily::kDepolarizing) {
      (mid_secure ? lo : hi) = mid;
    } else {
      (mid_secure ? hi : lo) = mid;
    }
  }
  res.threshold = 0.5 * (lo + hi);
  return res;
}

struct CurvePoint {
  double noise = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double chsh = 0.0;
  double epsilon = 0.0;
  double pg_bound = 0.0;
  bool failed = false;
  std::string error;
};

struct CurveData {
  std::string preset_name;
  NoiseFamily family = NoiseFamily::kDepolarizing;
  double fixed_q = 0.0;
  std::string npa_level;
  std::vector<CurvePoint> points;
};

// Per-point pipeline evaluation over a noise grid. Points are independent
// and evaluated concurrently; failures are flagged on the point, not
// dropped.
inline CurveData sweep_curve(const Preset& preset, NoiseFamily family,
                             const std::vector<double>& grid,
                             const npa::NpaLevel& level,
                             double fixed_q = 1e-3,
                             const sdp::SolveSettings& settings = {}) {
  if (grid.empty())
    throw std::invalid_argument("sweep_curve: empty noise grid");
  CurveData data;
  data.preset_name = preset.name;
  data.family = family;
  data.fixed_q = family == NoiseFamily::kDetection ? fixed_q : 0.0;
  data.npa_level = level.str();
  data.points.resize(grid.size());

  auto eval_point = [&](std::size_t i) {
    CurvePoint& pt = data.points[i];
    pt.noise = grid[i];
    try {
      NoiseSpec noise;
      if (family == NoiseFamily::kDepolarizing) {
        noise.depolarizing_q = grid[i];
      } else {
        noise.depolarizing_q = fixed_q;
        noise.detection_eta = grid[i];
      }
      Correlation c = noisy_correlation(preset, noise);
      pt.chsh = chsh_value(c, preset.chsh);
      ConditionReport rep = check_condition(c, preset.scenario, level,
                                            preset.condition, settings);
      pt.lhs = rep.lhs;
      pt.rhs = rep.rhs;
      pt.margin = rep.margin;
      pt.epsilon = rep.epsilon;
      pt.pg_bound = rep.pg_bound;
    } catch (const std::exception& e) {
      pt.failed = true;
      pt.error = e.what();
    }
  };

  std::vector<std::future<void>> tasks;
  tasks.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    tasks.push_back(std::async(std::launch::async, eval_point, i));
  for (auto& t : tasks) t.get();
  return data;
}

}  // namespace adcert
