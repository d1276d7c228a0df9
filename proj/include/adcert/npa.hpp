#pragma once

// Moment-matrix relaxation for a three-party commuting-projector model
// (Alice, Bob, Eve). Generators are outcome-0 projectors A_x, B_y and a
// single binary Eve measurement E; different parties commute, projectors
// are idempotent and self-adjoint. The Alice-Bob marginal is pinned to an
// observed correlation and a linear objective encodes Eve's (unnormalized)
// probability of guessing the key bit.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "adcert/correlation.hpp"
#include "adcert/sdp.hpp"

namespace adcert::npa {

// Canonical word: Alice letters, then Bob letters, then at most one E.
// Within a party, adjacent equal letters are collapsed (idempotence).
struct Monomial {
  std::vector<std::uint8_t> a_word;
  std::vector<std::uint8_t> b_word;
  bool has_e = false;

  static Monomial identity() { return {}; }

  int length() const {
    return static_cast<int>(a_word.size() + b_word.size()) + (has_e ? 1 : 0);
  }

  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend auto operator<=>(const Monomial& l, const Monomial& r) {
    if (auto c = l.length() <=> r.length(); c != 0) return c;
    if (auto c = l.a_word <=> r.a_word; c != 0) return c;
    if (auto c = l.b_word <=> r.b_word; c != 0) return c;
    return l.has_e <=> r.has_e;
  }

  std::string str() const {
    if (length() == 0) return "1";
    std::string s;
    for (auto x : a_word) s += "A" + std::to_string(int(x));
    for (auto y : b_word) s += "B" + std::to_string(int(y));
    if (has_e) s += "E";
    return s;
  }
};

namespace detail {

// Collapses adjacent duplicates until stable (idempotent projectors).
inline std::vector<std::uint8_t> reduce_word(std::vector<std::uint8_t> w) {
  std::vector<std::uint8_t> out;
  for (std::uint8_t c : w) {
    if (!out.empty() && out.back() == c) continue;
    out.push_back(c);
  }
  return out;
}

inline std::vector<std::uint8_t> concat_reduce(
    const std::vector<std::uint8_t>& l, const std::vector<std::uint8_t>& r) {
  std::vector<std::uint8_t> w = l;
  w.insert(w.end(), r.begin(), r.end());
  return reduce_word(std::move(w));
}

}  // namespace detail

// Canonical form of u^dagger v. Projectors are self-adjoint, so u^dagger is
// the reversal of u; parties commute past each other.
inline Monomial moment_entry(const Monomial& u, const Monomial& v) {
  Monomial out;
  std::vector<std::uint8_t> ua(u.a_word.rbegin(), u.a_word.rend());
  std::vector<std::uint8_t> ub(u.b_word.rbegin(), u.b_word.rend());
  out.a_word = detail::concat_reduce(ua, v.a_word);
  out.b_word = detail::concat_reduce(ub, v.b_word);
  out.has_e = u.has_e || v.has_e;
  return out;
}

struct NpaLevel {
  int k = 2;
  bool plus_abe = false;

  static NpaLevel parse(const std::string& text) {
    NpaLevel lvl;
    std::string base = text;
    if (auto pos = text.find("+ABE"); pos != std::string::npos) {
      lvl.plus_abe = true;
      base = text.substr(0, pos);
    }
    try {
      lvl.k = std::stoi(base);
    } catch (const std::exception&) {
      throw std::invalid_argument("NpaLevel: cannot parse '" + text + "'");
    }
    if (lvl.k < 1) throw std::invalid_argument("NpaLevel: level must be >= 1");
    return lvl;
  }

  std::string str() const {
    return std::to_string(k) + (plus_abe ? "+ABE" : "");
  }
};

struct MomentBasis {
  Scenario scenario;
  NpaLevel level;
  std::vector<Monomial> monomials;  // length-lex order, identity first

  std::optional<int> index_of(const Monomial& m) const {
    auto it = std::lower_bound(monomials.begin(), monomials.end(), m);
    if (it != monomials.end() && *it == m)
      return static_cast<int>(it - monomials.begin());
    return std::nullopt;
  }

  int size() const { return static_cast<int>(monomials.size()); }
};

namespace detail {

// All words of exactly `len` letters over `alphabet` symbols with no
// adjacent repeats.
inline void enumerate_words(int alphabet, int len,
                            std::vector<std::uint8_t>& cur,
                            std::vector<std::vector<std::uint8_t>>& out) {
  if (static_cast<int>(cur.size()) == len) {
    out.push_back(cur);
    return;
  }
  for (std::uint8_t c = 0; c < alphabet; ++c) {
    if (!cur.empty() && cur.back() == c) continue;
    cur.push_back(c);
    enumerate_words(alphabet, len, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<std::uint8_t>> words_up_to(int alphabet,
                                                          int max_len) {
  std::vector<std::vector<std::uint8_t>> out;
  for (int len = 0; len <= max_len; ++len) {
    std::vector<std::uint8_t> cur;
    enumerate_words(alphabet, len, cur, out);
  }
  return out;
}

}  // namespace detail

// All canonical words of length <= level.k; "+ABE" additionally includes the
// products A_x B_y E.
inline MomentBasis generate_basis(const Scenario& sc, const NpaLevel& level) {
  sc.validate();
  MomentBasis basis;
  basis.scenario = sc;
  basis.level = level;
  auto a_words = detail::words_up_to(sc.num_inputs_a, level.k);
  auto b_words = detail::words_up_to(sc.num_inputs_b, level.k);
  for (const auto& aw : a_words) {
    for (const auto& bw : b_words) {
      for (int e = 0; e < 2; ++e) {
        int len = static_cast<int>(aw.size() + bw.size()) + e;
        if (len > level.k) continue;
        basis.monomials.push_back({aw, bw, e == 1});
      }
    }
  }
  if (level.plus_abe) {
    std::vector<Monomial> extra;
    for (std::uint8_t x = 0; x < sc.num_inputs_a; ++x) {
      extra.push_back({{x}, {}, true});  // A_x E
      for (std::uint8_t y = 0; y < sc.num_inputs_b; ++y) {
        extra.push_back({{x}, {y}, false});  // A_x B_y
        extra.push_back({{x}, {y}, true});   // A_x B_y E
      }
    }
    for (std::uint8_t y = 0; y < sc.num_inputs_b; ++y)
      extra.push_back({{}, {y}, true});  // B_y E
    for (const Monomial& m : extra)
      if (std::find(basis.monomials.begin(), basis.monomials.end(), m) ==
          basis.monomials.end())
        basis.monomials.push_back(m);
  }
  std::sort(basis.monomials.begin(), basis.monomials.end());
  return basis;
}

struct MomentProblem {
  MomentBasis basis;
  // Word classes: canonical entry word -> positions (i <= j) in the moment
  // matrix. Positions sharing a word carry the same moment value.
  std::map<Monomial, std::vector<std::pair<int, int>>> classes;
  std::map<Monomial, double> data_constraints;  // pinned moments
  std::map<Monomial, double> objective;         // linear functional, maximize
  double objective_constant = 0.0;

  const std::vector<std::pair<int, int>>& positions_of(
      const Monomial& w) const {
    auto it = classes.find(w);
    if (it == classes.end())
      throw std::invalid_argument("MomentProblem: word " + w.str() +
                                  " has no moment-matrix entry");
    return it->second;
  }
};

inline MomentProblem index_moment_matrix(const MomentBasis& basis) {
  MomentProblem mp;
  mp.basis = basis;
  for (int i = 0; i < basis.size(); ++i)
    for (int j = i; j < basis.size(); ++j)
      mp.classes[moment_entry(basis.monomials[i], basis.monomials[j])]
          .push_back({i, j});
  return mp;
}

// Pins the Alice-Bob marginal of the moment matrix to the observed table:
// <A_x> = p_A(0|x), <B_y> = p_B(0|y), <A_x B_y> = p(00|xy). With binary
// outcomes this fixes the full distribution. Eve's marginal is left free.
// Objective: <A0 B0 E> + <(1-A0)(1-B0)(1-E)>, the unnormalized probability
// that Eve's outcome matches the key bit on equal outcomes; the triple
// product cancels when expanded, leaving pairwise words only.
inline MomentProblem build_guessing_problem(const Correlation& c,
                                            const MomentBasis& basis) {
  c.validate();
  const Scenario& sc = basis.scenario;
  if (c.num_inputs_a() != sc.num_inputs_a ||
      c.num_inputs_b() != sc.num_inputs_b)
    throw std::invalid_argument(
        "build_guessing_problem: correlation does not match scenario");
  if (std::abs(c.at(0, 0, 0, 0) - c.at(1, 1, 0, 0)) > tol::kSymmetry)
    throw std::invalid_argument(
        "build_guessing_problem: correlation is not symmetrised");

  MomentProblem mp = index_moment_matrix(basis);
  const Monomial a0{{0}, {}, false}, b0{{}, {0}, false}, e{{}, {}, true};
  const Monomial a0b0{{0}, {0}, false};
  const Monomial a0b0e{{0}, {0}, true};
  if (!mp.classes.count(a0b0) || !mp.classes.count(a0b0e))
    throw std::invalid_argument(
        "build_guessing_problem: basis too small, needs the words A0B0 and "
        "A0B0E (level >= 2 or 1+ABE)");

  for (std::uint8_t x = 0; x < sc.num_inputs_a; ++x)
    mp.data_constraints[{{x}, {}, false}] = c.marginal_a(0, x);
  for (std::uint8_t y = 0; y < sc.num_inputs_b; ++y)
    mp.data_constraints[{{}, {y}, false}] = c.marginal_b(0, y);
  for (std::uint8_t x = 0; x < sc.num_inputs_a; ++x)
    for (std::uint8_t y = 0; y < sc.num_inputs_b; ++y)
      mp.data_constraints[{{x}, {y}, false}] = c.at(0, 0, x, y);

  // <A0B0E> + <(1-A0)(1-B0)(1-E)> expanded over generator words.
  mp.objective_constant = 1.0;
  mp.objective[a0] = -1.0;
  mp.objective[b0] = -1.0;
  mp.objective[e] = -1.0;
  mp.objective[a0b0] = 1.0;
  mp.objective[{{0}, {}, true}] = 1.0;  // A0 E
  mp.objective[{{}, {0}, true}] = 1.0;  // B0 E
  return mp;
}

// CHSH maximization over the relaxation, with no data constraints. The
// correlator E(x,y) expands as 4<A_x B_y> - 2<A_x> - 2<B_y> + 1.
inline MomentProblem build_chsh_problem(const MomentBasis& basis,
                                        const ChshConvention& terms) {
  MomentProblem mp = index_moment_matrix(basis);
  for (const ChshTerm& t : terms) {
    auto x = static_cast<std::uint8_t>(t.x);
    auto y = static_cast<std::uint8_t>(t.y);
    mp.objective[{{x}, {y}, false}] += 4.0 * t.sign;
    mp.objective[{{x}, {}, false}] += -2.0 * t.sign;
    mp.objective[{{}, {y}, false}] += -2.0 * t.sign;
    mp.objective_constant += t.sign;
  }
  return mp;
}

// Standard-form translation, after variable substitution. Entries sharing a
// canonical word are one moment variable, so the relaxation is the linear
// matrix inequality
//
//   maximize  offset + sum_w c_w u_w   over free-word moments u_w
//   subject to  M(u) = F0 + sum_w u_w B_w  >=  0,
//
// where F0 carries the identity entry and the pinned (data) moments, and B_w
// is the 0/1 indicator of word w's positions. Equality redundancy between
// tied entries is eliminated here by the substitution, never inside the
// solver. The SDP handed to the solver is the conic dual of the LMI,
//
//   minimize <F0, Z>  subject to  <B_w, Z> = -c_w,  Z >= 0:
//
// any feasible Z certifies  offset + <F0, Z>  as an upper bound on the
// maximum, and certified_value() below turns an approximately feasible Z
// into a rigorous one.
struct SdpTranslation {
  sdp::SdpProblem problem;          // the dual certificate problem (minimize)
  double offset = 0.0;              // constant + pinned part of the objective
  std::vector<Monomial> free_words; // one per constraint, in problem order
};

inline SdpTranslation to_sdp(const MomentProblem& mp) {
  SdpTranslation tr;
  sdp::SdpProblem& p = tr.problem;
  const int n = mp.basis.size();
  p.n = n;
  p.sense = sdp::Sense::kMinimize;
  p.objective = sdp::Matrix::Zero(n, n);
  tr.offset = mp.objective_constant;

  for (const auto& [word, value] : mp.data_constraints) {
    if (value < -tol::kProbability || value > 1.0 + tol::kProbability)
      throw std::invalid_argument("to_sdp: data constraint outside [0,1]");
    if (!mp.classes.count(word))
      throw std::invalid_argument("to_sdp: pinned word " + word.str() +
                                  " has no moment-matrix entry");
  }

  std::vector<double> b_values;
  for (const auto& [word, positions] : mp.classes) {
    double coeff = 0.0;
    if (auto it = mp.objective.find(word); it != mp.objective.end())
      coeff = it->second;
    auto pin = mp.data_constraints.find(word);
    bool pinned = word == Monomial{} || pin != mp.data_constraints.end();
    if (pinned) {
      double value = word == Monomial{} ? 1.0 : pin->second;
      for (auto [i, j] : positions) {
        p.objective(i, j) += value;
        if (i != j) p.objective(j, i) += value;
      }
      tr.offset += coeff * value;
    } else {
      sdp::SparseSym a;
      for (auto [i, j] : positions) a.add_sym(i, j, 1.0);
      p.constraints.push_back(std::move(a));
      b_values.push_back(-coeff);
      tr.free_words.push_back(word);
    }
  }
  p.rhs = Eigen::Map<const sdp::Vector>(
      b_values.data(), static_cast<Eigen::Index>(b_values.size()));
  return tr;
}

// Mixes each pinned moment toward the value it takes on the uniformly random
// table (1/2 for single-operator words, 1/4 for A_x B_y). At an extremal
// correlation the relaxation's feasible set has empty interior and the
// optimum is unattained; an interior-restoring perturbation of size delta
// moves the optimum by O(sqrt(delta)) and lets the interior-point iteration
// converge. The constraint matrices are unchanged, only F0 and the offset,
// so a certificate for the perturbed instance can be re-scored against the
// unperturbed one.
inline MomentProblem perturb_pins(const MomentProblem& mp, double delta) {
  MomentProblem out = mp;
  for (auto& [word, value] : out.data_constraints) {
    double uniform =
        word.a_word.size() + word.b_word.size() == 2 ? 0.25 : 0.5;
    value = (1.0 - delta) * value + delta * uniform;
  }
  return out;
}

// Rigorous upper bound on the LMI maximum from any symmetric z, feasible or
// not. With r_w = <B_w, z> - b_w and eta = max(0, -lambda_min(z)),
//
//   max <= offset + <F0, z> + sum_w |r_w| + n * eta,
//
// because every free moment satisfies |u_w| <= 1 (words are contractions)
// and tr M(u) <= n (diagonal moments are probabilities). Valid regardless
// of how z was produced; solver stalls only loosen the bound.
inline double certified_value(const SdpTranslation& tr, const sdp::Matrix& z) {
  const sdp::SdpProblem& p = tr.problem;
  double bound = tr.offset + (p.objective.array() * z.array()).sum();
  for (std::size_t i = 0; i < p.constraints.size(); ++i)
    bound += std::abs(p.constraints[i].dot(z) -
                      p.rhs(static_cast<Eigen::Index>(i)));
  Eigen::SelfAdjointEigenSolver<sdp::Matrix> es(z, Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  if (lmin < 0.0) bound += p.n * (-lmin);
  return bound;
}

// Human-readable structure dump for debugging.
inline void dump(const MomentProblem& mp, std::ostream& os) {
  os << "basis (level " << mp.basis.level.str() << ", size "
     << mp.basis.size() << "):";
  for (const auto& m : mp.basis.monomials) os << " " << m.str();
  os << "\nword classes: " << mp.classes.size() << "\n";
  for (const auto& [word, positions] : mp.classes) {
    os << "  " << word.str() << " @";
    for (auto [i, j] : positions) os << " (" << i << "," << j << ")";
    os << "\n";
  }
  os << "data constraints:\n";
  for (const auto& [word, value] : mp.data_constraints)
    os << "  <" << word.str() << "> = " << value << "\n";
  os << "objective: " << mp.objective_constant;
  for (const auto& [word, coeff] : mp.objective)
    os << " + " << coeff << "*<" << word.str() << ">";
  os << "\n";
}

}  // namespace adcert::npa
