#pragma once

// CSV serialization: comma-separated, '.' decimal, mandatory header row,
// '#'-prefixed metadata comment lines. Numbers are printed with %.12g so a
// rerun with identical inputs is byte-identical.

#include <cstdio>
#include <ostream>
#include <string>

#include "adcert/protocol.hpp"
#include "adcert/security.hpp"
#include "adcert/thresholds.hpp"

namespace adcert::csv {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline void write_report(const ConditionReport& rep, std::ostream& os) {
  os << "condition,level,epsilon,pg_bound,d_bound,f_bound,lhs,rhs,margin,"
        "holds,d_clipped\n";
  os << to_string(rep.condition) << "," << rep.npa_level << ","
     << num(rep.epsilon) << "," << num(rep.pg_bound) << ","
     << num(rep.d_bound) << "," << num(rep.f_bound) << "," << num(rep.lhs)
     << "," << num(rep.rhs) << "," << num(rep.margin) << ","
     << (rep.holds ? 1 : 0) << "," << (rep.d_clipped ? 1 : 0) << "\n";
}

inline void write_curve(const CurveData& data, std::ostream& os) {
  os << "# preset=" << data.preset_name << " family=" << to_string(data.family)
     << " level=" << data.npa_level;
  if (data.family == NoiseFamily::kDetection)
    os << " fixed_q=" << num(data.fixed_q);
  os << "\n";
  os << "noise,lhs,rhs,margin,chsh,epsilon,pg_bound,level,failed\n";
  for (const CurvePoint& pt : data.points) {
    os << num(pt.noise) << "," << num(pt.lhs) << "," << num(pt.rhs) << ","
       << num(pt.margin) << "," << num(pt.chsh) << "," << num(pt.epsilon)
       << "," << num(pt.pg_bound) << "," << data.npa_level << ","
       << (pt.failed ? 1 : 0) << "\n";
  }
}

inline void write_threshold(const ThresholdResult& res, std::ostream& os) {
  os << "# preset=" << res.preset_name << " family=" << to_string(res.family)
     << " level=" << res.npa_level;
  if (res.family == NoiseFamily::kDetection)
    os << " fixed_q=" << num(res.fixed_q);
  os << "\n";
  os << "preset,family,threshold,bracket_low,bracket_high,iterations,level\n";
  os << res.preset_name << "," << to_string(res.family) << ","
     << num(res.threshold) << "," << num(res.bracket_low) << ","
     << num(res.bracket_high) << "," << res.iterations << "," << res.npa_level
     << "\n";
}

inline void write_stats(const protocol::ProtocolStats& stats,
                        std::ostream& os) {
  os << "# seed=" << stats.seed << "\n";
  os << "n,epsilon,trials,accept_rate,accept_rate_stderr,conditional_error,"
        "conditional_error_stderr,seed\n";
  os << stats.n << "," << num(stats.epsilon) << "," << stats.trials << ","
     << num(stats.accept_rate) << "," << num(stats.accept_rate_stderr) << ","
     << num(stats.conditional_error) << ","
     << num(stats.conditional_error_stderr) << "," << stats.seed << "\n";
}

}  // namespace adcert::csv
