#pragma once

// Conditional outcome tables p(ab|xy) for two-party binary-outcome Bell
// scenarios, together with the classical post-processing used by the
// certification pipeline: depolarising noise, detection inefficiency,
// symmetrisation and CHSH evaluation.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace adcert {

struct Scenario {
  int num_inputs_a = 2;
  int num_inputs_b = 2;
  int key_input_a = 0;
  int key_input_b = 0;

  void validate() const {
    if (num_inputs_a < 1 || num_inputs_b < 1)
      throw std::invalid_argument("Scenario: input counts must be >= 1");
    if (key_input_a < 0 || key_input_a >= num_inputs_a ||
        key_input_b < 0 || key_input_b >= num_inputs_b)
      throw std::invalid_argument("Scenario: key input out of range");
  }
};

// One CHSH correlator term: sign * E(x, y).
struct ChshTerm {
  int x = 0;
  int y = 0;
  double sign = 1.0;
};
using ChshConvention = std::array<ChshTerm, 4>;

namespace tol {
inline constexpr double kOperator = 1e-12;   // states and projectors
inline constexpr double kProbability = 1e-10;
inline constexpr double kNoSignaling = 1e-9;
inline constexpr double kSymmetry = 1e-9;
}  // namespace tol

// p(ab|xy), outcomes a,b in {0,1}, inputs x < nx, y < ny.
class Correlation {
 public:
  Correlation() = default;
  Correlation(int nx, int ny)
      : nx_(nx), ny_(ny), p_(static_cast<std::size_t>(4 * nx * ny), 0.0) {
    if (nx < 1 || ny < 1)
      throw std::invalid_argument("Correlation: input counts must be >= 1");
  }

  int num_inputs_a() const { return nx_; }
  int num_inputs_b() const { return ny_; }

  double& at(int a, int b, int x, int y) { return p_[index(a, b, x, y)]; }
  double at(int a, int b, int x, int y) const { return p_[index(a, b, x, y)]; }

  // Marginal probability of outcome `a` for Alice's input x (uses y = 0).
  double marginal_a(int a, int x) const {
    return at(a, 0, x, 0) + at(a, 1, x, 0);
  }
  double marginal_b(int b, int y) const {
    return at(0, b, 0, y) + at(1, b, 0, y);
  }

  void validate() const {
    for (double v : p_) {
      if (!(v > -tol::kProbability && v < 1.0 + tol::kProbability))
        throw std::invalid_argument("Correlation: entry outside [0,1]");
    }
    for (int x = 0; x < nx_; ++x) {
      for (int y = 0; y < ny_; ++y) {
        double sum = at(0, 0, x, y) + at(0, 1, x, y) + at(1, 0, x, y) +
                     at(1, 1, x, y);
        if (std::abs(sum - 1.0) > tol::kProbability)
          throw std::invalid_argument("Correlation: not normalized");
      }
    }
    // No-signaling: Alice's marginal independent of y, Bob's of x.
    for (int x = 0; x < nx_; ++x) {
      for (int a = 0; a < 2; ++a) {
        double ref = at(a, 0, x, 0) + at(a, 1, x, 0);
        for (int y = 1; y < ny_; ++y) {
          double m = at(a, 0, x, y) + at(a, 1, x, y);
          if (std::abs(m - ref) > tol::kNoSignaling)
            throw std::invalid_argument("Correlation: signaling A->B");
        }
      }
    }
    for (int y = 0; y < ny_; ++y) {
      for (int b = 0; b < 2; ++b) {
        double ref = at(0, b, 0, y) + at(1, b, 0, y);
        for (int x = 1; x < nx_; ++x) {
          double m = at(0, b, x, y) + at(1, b, x, y);
          if (std::abs(m - ref) > tol::kNoSignaling)
            throw std::invalid_argument("Correlation: signaling B->A");
        }
      }
    }
  }

 private:
  std::size_t index(int a, int b, int x, int y) const {
    return static_cast<std::size_t>(((a * 2 + b) * nx_ + x) * ny_ + y);
  }

  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> p_;
};

// Depolarising noise: p -> (1-2q) p + q/2 entrywise.
inline Correlation apply_depolarizing(const Correlation& c, double q) {
  if (!(q >= 0.0 && q <= 0.5))
    throw std::invalid_argument("apply_depolarizing: q must lie in [0, 1/2]");
  Correlation out(c.num_inputs_a(), c.num_inputs_b());
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int x = 0; x < c.num_inputs_a(); ++x)
        for (int y = 0; y < c.num_inputs_b(); ++y)
          out.at(a, b, x, y) = (1.0 - 2.0 * q) * c.at(a, b, x, y) + q / 2.0;
  return out;
}

// Limited detection efficiency: each party's outcome 1 flips to 0 with
// probability 1-eta, independently (Z-channel on each side).
inline Correlation apply_detection(const Correlation& c, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("apply_detection: eta must lie in [0, 1]");
  Correlation out(c.num_inputs_a(), c.num_inputs_b());
  for (int x = 0; x < c.num_inputs_a(); ++x) {
    for (int y = 0; y < c.num_inputs_b(); ++y) {
      double p00 = c.at(0, 0, x, y), p01 = c.at(0, 1, x, y);
      double p10 = c.at(1, 0, x, y), p11 = c.at(1, 1, x, y);
      double loss = 1.0 - eta;
      out.at(0, 0, x, y) = p00 + loss * p01 + loss * p10 + loss * loss * p11;
      out.at(0, 1, x, y) = eta * p01 + eta * loss * p11;
      out.at(1, 0, x, y) = eta * p10 + eta * loss * p11;
      out.at(1, 1, x, y) = eta * eta * p11;
    }
  }
  return out;
}

// Symmetrisation: both parties flip outcomes with a shared uniform bit,
// implemented as the average p'(ab|xy) = [p(ab|xy) + p(a'b'|xy)]/2. If the
// key error would exceed 1/2, Bob's outcome labels are swapped on all inputs.
inline Correlation symmetrize(const Correlation& c) {
  Correlation out(c.num_inputs_a(), c.num_inputs_b());
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int x = 0; x < c.num_inputs_a(); ++x)
        for (int y = 0; y < c.num_inputs_b(); ++y)
          out.at(a, b, x, y) =
              0.5 * (c.at(a, b, x, y) + c.at(1 - a, 1 - b, x, y));
  double eps = out.at(0, 1, 0, 0) + out.at(1, 0, 0, 0);
  if (eps > 0.5) {
    Correlation swapped(c.num_inputs_a(), c.num_inputs_b());
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int x = 0; x < c.num_inputs_a(); ++x)
          for (int y = 0; y < c.num_inputs_b(); ++y)
            swapped.at(a, b, x, y) = out.at(a, 1 - b, x, y);
    return swapped;
  }
  return out;
}

// Key error rate eps = p(01|00) + p(10|00) of a symmetrised table.
inline double key_error_rate(const Correlation& c) {
  double diag_gap = std::abs(c.at(0, 0, 0, 0) - c.at(1, 1, 0, 0));
  double off_gap = std::abs(c.at(0, 1, 0, 0) - c.at(1, 0, 0, 0));
  if (diag_gap > tol::kSymmetry || off_gap > tol::kSymmetry)
    throw std::invalid_argument("key_error_rate: table is not symmetrised");
  return c.at(0, 1, 0, 0) + c.at(1, 0, 0, 0);
}

inline double correlator(const Correlation& c, int x, int y) {
  return c.at(0, 0, x, y) - c.at(0, 1, x, y) - c.at(1, 0, x, y) +
         c.at(1, 1, x, y);
}

inline double chsh_value(const Correlation& c, const ChshConvention& terms) {
  double s = 0.0;
  for (const ChshTerm& t : terms) {
    if (t.x < 0 || t.x >= c.num_inputs_a() || t.y < 0 ||
        t.y >= c.num_inputs_b())
      throw std::invalid_argument("chsh_value: input index out of range");
    s += t.sign * correlator(c, t.x, t.y);
  }
  return s;
}

}  // namespace adcert
