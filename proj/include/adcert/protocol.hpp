#pragma once

// Repetition-code advantage distillation over an IID binary symmetric
// channel with error rate eps: Monte Carlo simulation plus the closed-form
// acceptance probability, conditional error and entropy term.
//
// Randomness is a splitmix64 stream seeded explicitly; per-trial streams are
// derived from the master seed by offsetting, so results are bit-reproducible
// regardless of batching.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace adcert::protocol {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  bool bit() { return next() >> 63; }

  // Bernoulli(p) from a 53-bit uniform draw.
  bool bernoulli(double p) {
    double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return u < p;
  }

 private:
  std::uint64_t state_;
};

struct BlockOutcome {
  bool accepted = false;
  int c = 0;        // Alice's secret bit
  int c_prime = 0;  // Bob's decoded bit, meaningful only when accepted
  std::vector<std::uint8_t> message;
};

inline void check_params(double eps, int n) {
  if (!(eps >= 0.0 && eps < 0.5))
    throw std::invalid_argument("protocol: eps must lie in [0, 1/2)");
  if (n < 1) throw std::invalid_argument("protocol: block size must be >= 1");
}

inline BlockOutcome simulate_block(double eps, int n, SplitMix64& rng) {
  BlockOutcome out;
  out.c = rng.bit() ? 1 : 0;
  out.message.resize(static_cast<std::size_t>(n));
  // b0 ^ m = a0 ^ noise ^ a0 ^ c = noise ^ c; the block is accepted iff
  // the noise string is constant.
  bool all0 = true, all1 = true;
  for (int i = 0; i < n; ++i) {
    int a = rng.bit() ? 1 : 0;
    int flip = rng.bernoulli(eps) ? 1 : 0;
    int b = a ^ flip;
    int m = a ^ out.c;
    out.message[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(m);
    int r = b ^ m;
    all0 = all0 && r == 0;
    all1 = all1 && r == 1;
  }
  out.accepted = all0 || all1;
  if (out.accepted) out.c_prime = all0 ? 0 : 1;
  return out;
}

inline BlockOutcome simulate_block(double eps, int n, std::uint64_t seed) {
  check_params(eps, n);
  SplitMix64 rng(seed);
  return simulate_block(eps, n, rng);
}

struct ProtocolStats {
  int n = 0;
  double epsilon = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double accept_rate = 0.0;
  double accept_rate_stderr = 0.0;
  double conditional_error = 0.0;        // Pr[C != C' | D = 1]
  double conditional_error_stderr = 0.0;
  std::uint64_t accepted = 0;
  std::uint64_t errors = 0;
};

inline ProtocolStats simulate(double eps, int n, std::uint64_t trials,
                              std::uint64_t seed) {
  check_params(eps, n);
  if (trials == 0) throw std::invalid_argument("protocol: trials must be > 0");
  ProtocolStats stats;
  stats.n = n;
  stats.epsilon = eps;
  stats.trials = trials;
  stats.seed = seed;
  for (std::uint64_t t = 0; t < trials; ++t) {
    // Independent stream per trial: splitmix64 seeded at seed + trial index.
    SplitMix64 rng(seed + t);
    BlockOutcome out = simulate_block(eps, n, rng);
    if (out.accepted) {
      ++stats.accepted;
      if (out.c_prime != out.c) ++stats.errors;
    }
  }
  double tN = static_cast<double>(trials);
  double p = static_cast<double>(stats.accepted) / tN;
  stats.accept_rate = p;
  stats.accept_rate_stderr = std::sqrt(p * (1.0 - p) / tN);
  if (stats.accepted > 0) {
    double aN = static_cast<double>(stats.accepted);
    double q = static_cast<double>(stats.errors) / aN;
    stats.conditional_error = q;
    stats.conditional_error_stderr = std::sqrt(q * (1.0 - q) / aN);
  }
  return stats;
}

// Pr[D = 1] = eps^n + (1-eps)^n.
inline double analytic_accept_prob(double eps, int n) {
  check_params(eps, n);
  return std::pow(eps, n) + std::pow(1.0 - eps, n);
}

// eps_n = Pr[C != C' | D = 1] = eps^n / (eps^n + (1-eps)^n).
inline double conditional_error(double eps, int n) {
  check_params(eps, n);
  double en = std::pow(eps, n);
  return en / (en + std::pow(1.0 - eps, n));
}

inline double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("binary_entropy: p must lie in [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// H(C|C'; D=1) = h(eps_n).
inline double classical_entropy_term(double eps, int n) {
  return binary_entropy(conditional_error(eps, n));
}

// (eps^n + (1-eps)^n)/n, the per-round multiplier on the per-block rate.
inline double rate_factor(double eps, int n) {
  return analytic_accept_prob(eps, n) / n;
}

}  // namespace adcert::protocol
