#pragma once

// Dense primal-dual path-following solver for standard-form semidefinite
// programs
//
//   max/min <C, X>   s.t.  <A_i, X> = b_i,  X >= 0,
//
// using the HKM direction with a Mehrotra predictor-corrector step. The
// constraint matrices are sparse (a handful of entries each); the Schur
// complement is formed from their nonzero patterns and factored densely.
// For maximization the dual objective is the certified upper bound.

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace adcert::sdp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SparseEntry {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// Symmetric matrix stored as a full list of nonzeros (both (i,j) and (j,i)
// for off-diagonal entries).
struct SparseSym {
  std::vector<SparseEntry> entries;

  // Adds v at (i,j) and, if off-diagonal, v at (j,i).
  void add_sym(int i, int j, double v) {
    entries.push_back({i, j, v});
    if (i != j) entries.push_back({j, i, v});
  }

  double dot(const Matrix& m) const {
    double s = 0.0;
    for (const auto& e : entries) s += e.value * m(e.row, e.col);
    return s;
  }

  void add_to(Matrix& m, double scale) const {
    for (const auto& e : entries) m(e.row, e.col) += scale * e.value;
  }

  Matrix dense(int n) const {
    Matrix m = Matrix::Zero(n, n);
    add_to(m, 1.0);
    return m;
  }
};

enum class Sense { kMaximize, kMinimize };

struct SdpProblem {
  int n = 0;                      // block dimension
  Matrix objective;               // C, symmetric n x n
  std::vector<SparseSym> constraints;  // A_i
  Vector rhs;                     // b
  Sense sense = Sense::kMaximize;

  void validate() const {
    if (n < 1) throw std::invalid_argument("SdpProblem: empty block");
    if (objective.rows() != n || objective.cols() != n)
      throw std::invalid_argument("SdpProblem: objective dimension mismatch");
    if ((objective - objective.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("SdpProblem: objective not symmetric");
    if (rhs.size() != static_cast<Eigen::Index>(constraints.size()))
      throw std::invalid_argument("SdpProblem: rhs size mismatch");
    for (const auto& a : constraints) {
      Matrix d = a.dense(n);
      if ((d - d.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("SdpProblem: constraint not symmetric");
    }
  }
};

enum class SolveStatus { kOptimal, kInfeasible, kMaxIterations, kNumericalFailure };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kMaxIterations: return "max-iterations";
    case SolveStatus::kNumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

// Working precision of the interior-point iteration. Degenerate instances
// (optimum on the cone boundary, empty relative interior) stall in double a
// few decades short of the tolerances; rerunning in long double buys the
// missing digits at a constant-factor cost.
enum class Precision { kDouble, kLongDouble };

struct SolveSettings {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 200;
  double step_fraction = 0.98;  // fraction-to-boundary
  Precision precision = Precision::kDouble;
};

struct SdpSolution {
  Matrix x;            // primal matrix
  Vector y;            // dual multipliers
  Matrix s;            // dual slack
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::kNumericalFailure;

  // Certified bound in the problem's own sense: for maximization the dual
  // value bounds the optimum from above, for minimization from below.
  double certified_bound = 0.0;
};

namespace detail {

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
Scalar sparse_dot(const SparseSym& a, const Mat<Scalar>& m) {
  Scalar s = 0;
  for (const auto& e : a.entries) s += Scalar(e.value) * m(e.row, e.col);
  return s;
}

template <class Scalar>
void sparse_add_to(const SparseSym& a, Mat<Scalar>& m, Scalar scale) {
  for (const auto& e : a.entries) m(e.row, e.col) += scale * Scalar(e.value);
}

// Largest step alpha in [0, 1] with M + alpha*D >= 0, scaled by `fraction`.
template <class Scalar>
double max_step(const Mat<Scalar>& m, const Mat<Scalar>& d, double fraction) {
  Eigen::LLT<Mat<Scalar>> llt(m);
  if (llt.info() != Eigen::Success) {
    // Near-singular iterate (solution on the cone boundary): factor a
    // slightly regularized copy so the search direction is not frozen.
    Scalar delta = Scalar(1e-12) * (Scalar(1) + m.norm());
    llt.compute(m + delta * Mat<Scalar>::Identity(m.rows(), m.cols()));
    if (llt.info() != Eigen::Success) return 0.0;
  }
  Mat<Scalar> l = llt.matrixL();
  Mat<Scalar> w = l.template triangularView<Eigen::Lower>().solve(d);
  Mat<Scalar> w2 = l.template triangularView<Eigen::Lower>()
                       .solve(w.transpose())
                       .transpose();
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(
      Mat<Scalar>(0.5 * (w2 + w2.transpose())), Eigen::EigenvaluesOnly);
  double lmin = static_cast<double>(es.eigenvalues().minCoeff());
  if (lmin >= 0.0) return 1.0;
  return std::min(1.0, -fraction / lmin);
}

template <class Scalar>
SdpSolution solve_impl(const SdpProblem& problem,
                       const SolveSettings& settings) {
  using M = Mat<Scalar>;
  using V = Vec<Scalar>;
  const int n = problem.n;
  const int m = static_cast<int>(problem.constraints.size());
  const bool maximize = problem.sense == Sense::kMaximize;
  // Internal form: max <C,X>; dual min b'y with S = sum_i y_i A_i - C >= 0.
  M c = problem.objective.cast<Scalar>();
  if (!maximize) c = -c;
  V b = problem.rhs.cast<Scalar>();

  Scalar tau = Scalar(1) + (m > 0 ? b.cwiseAbs().maxCoeff() : Scalar(0)) +
               c.norm();
  M x = tau * M::Identity(n, n);
  M s = tau * M::Identity(n, n);
  V y = V::Zero(m);

  SdpSolution sol;
  double b_scale = 1.0 + (m > 0 ? static_cast<double>(b.norm()) : 0.0);
  double c_scale = 1.0 + static_cast<double>(c.norm());

  // Best iterate seen, by worst of the scaled optimality measures. Degenerate
  // problems stall near machine precision and can then drift; the answer
  // reported is the best point visited, not the last one.
  M best_x = x, best_s = s;
  V best_y = y;
  double best_score = std::numeric_limits<double>::infinity();
  int since_best = 0;

  auto finish = [&](SolveStatus status, int iters) {
    sol.status = status;
    sol.iterations = iters;
    sol.x = x.template cast<double>();
    sol.y = y.template cast<double>();
    sol.s = s.template cast<double>();
    double pobj = static_cast<double>((c.array() * x.array()).sum());
    double dobj = (m > 0) ? static_cast<double>(b.dot(y)) : 0.0;
    if (!maximize) {
      pobj = -pobj;
      dobj = -dobj;
    }
    sol.primal_objective = pobj;
    sol.dual_objective = dobj;
    sol.gap = dobj - pobj;
    sol.certified_bound = dobj;
    return sol;
  };

  for (int iter = 0; iter < settings.max_iter; ++iter) {
    Eigen::LLT<M> llt_s(s);
    if (llt_s.info() != Eigen::Success) {
      Scalar delta = Scalar(1e-12) * (Scalar(1) + s.norm());
      llt_s.compute(s + delta * M::Identity(n, n));
      if (llt_s.info() != Eigen::Success)
        return finish(SolveStatus::kNumericalFailure, iter);
    }
    M z = llt_s.solve(M::Identity(n, n));  // S^{-1}
    z = M(0.5 * (z + z.transpose().eval()));

    V rp(m);
    for (int i = 0; i < m; ++i)
      rp(i) = b(i) - sparse_dot<Scalar>(problem.constraints[i], x);
    M rd = c + s;  // residual of A*(y) - S = C
    for (int i = 0; i < m; ++i)
      sparse_add_to<Scalar>(problem.constraints[i], rd, -y(i));

    Scalar mu = (x.array() * s.array()).sum() / n;
    Scalar pobj = (c.array() * x.array()).sum();
    Scalar dobj = b.dot(y);
    double rel_gap = static_cast<double>(
        (dobj - pobj >= 0 ? dobj - pobj : pobj - dobj) /
        (Scalar(1) + (dobj >= 0 ? dobj : -dobj)));
    if (static_cast<double>(rp.norm()) / b_scale <= settings.feas_tol &&
        static_cast<double>(rd.norm()) / c_scale <= settings.feas_tol &&
        rel_gap <= settings.gap_tol)
      return finish(SolveStatus::kOptimal, iter);

    double score = std::max({static_cast<double>(rp.norm()) / b_scale,
                             static_cast<double>(rd.norm()) / c_scale,
                             rel_gap});
    if (score < best_score) {
      best_score = score;
      best_x = x;
      best_y = y;
      best_s = s;
      since_best = 0;
    } else if (++since_best >= 15) {
      // No progress in 15 iterations: report the best point visited.
      x = best_x;
      y = best_y;
      s = best_s;
      bool close = best_score <=
                   100.0 * std::max(settings.feas_tol, settings.gap_tol);
      return finish(close ? SolveStatus::kOptimal
                          : SolveStatus::kNumericalFailure,
                    iter);
    }

    // Diverging dual with shrinking primal infeasibility certificate is not
    // analyzed in detail; blow-up is reported as infeasible.
    if (static_cast<double>(y.norm()) > 1e12 ||
        static_cast<double>(x.trace()) > 1e14)
      return finish(SolveStatus::kInfeasible, iter);

    // Symmetrized scaling operator H(U) = (X U S^{-1} + S^{-1} U X) / 2.
    // The plain product X A_j S^{-1} gives a nonsymmetric Schur matrix when X
    // and S do not commute; the symmetrized form is exact and PD.
    auto scale_op = [&](const M& u) {
      M t = x * u * z;
      return M(0.5 * (t + t.transpose()));
    };

    // Schur complement M_ij = tr(A_i H(A_j)): one dense H(A_j) per column,
    // then sparse dots down the column.
    M schur = M::Zero(m, m);
    M aj = M::Zero(n, n);
    for (int j = 0; j < m; ++j) {
      aj.setZero();
      sparse_add_to<Scalar>(problem.constraints[j], aj, Scalar(1));
      M haj = scale_op(aj);
      for (int i = 0; i <= j; ++i) {
        schur(i, j) = sparse_dot<Scalar>(problem.constraints[i], haj);
        schur(j, i) = schur(i, j);
      }
    }
    Eigen::LDLT<M> ldlt(schur);
    if (ldlt.info() != Eigen::Success)
      return finish(SolveStatus::kNumericalFailure, iter);
    // One round of iterative refinement; the Schur system grows
    // ill-conditioned as mu shrinks and a plain solve caps the attainable
    // feasibility around 1e-8.
    auto schur_solve = [&](const V& r) {
      V t = ldlt.solve(r);
      t += ldlt.solve(r - schur * t);
      return t;
    };

    V a1(m);  // tr(A_i S^{-1})
    M h_rd = scale_op(rd);
    V v_rd(m);
    for (int i = 0; i < m; ++i) {
      a1(i) = sparse_dot<Scalar>(problem.constraints[i], z);
      v_rd(i) = sparse_dot<Scalar>(problem.constraints[i], h_rd);
    }

    // Predictor (affine-scaling direction).
    V dy_aff = schur_solve(v_rd - b);
    M ds_aff = -rd;
    for (int i = 0; i < m; ++i)
      sparse_add_to<Scalar>(problem.constraints[i], ds_aff, dy_aff(i));
    M dx_aff = -x - scale_op(ds_aff);

    double ap = max_step<Scalar>(x, dx_aff, settings.step_fraction);
    double ad = max_step<Scalar>(s, ds_aff, settings.step_fraction);
    Scalar mu_aff = ((x + Scalar(ap) * dx_aff).array() *
                     (s + Scalar(ad) * ds_aff).array())
                        .sum() /
                    n;
    double sigma =
        std::pow(std::max(0.0, static_cast<double>(mu_aff / mu)), 3);
    sigma = std::min(1.0, sigma);

    // Corrector.
    M corr = dx_aff * ds_aff * z;
    corr = M(0.5 * (corr + corr.transpose().eval()));
    V w(m);
    for (int i = 0; i < m; ++i)
      w(i) = sparse_dot<Scalar>(problem.constraints[i], corr);
    V dy = schur_solve(Scalar(sigma) * mu * a1 + v_rd - w - b);
    M ds = -rd;
    for (int i = 0; i < m; ++i)
      sparse_add_to<Scalar>(problem.constraints[i], ds, dy(i));
    M dx = Scalar(sigma) * mu * z - x - scale_op(ds) - corr;

    ap = max_step<Scalar>(x, dx, settings.step_fraction);
    ad = max_step<Scalar>(s, ds, settings.step_fraction);
    // Guard against rounding in max_step pushing an iterate onto the
    // boundary: back off until the Cholesky factorization succeeds.
    auto backtrack = [n](const M& base, const M& dir, double a) {
      Scalar delta = Scalar(1e-12) * (Scalar(1) + base.norm());
      M reg = delta * M::Identity(n, n);
      while (a > 1e-14 &&
             Eigen::LLT<M>(M(base + Scalar(a) * dir + reg)).info() !=
                 Eigen::Success)
        a *= 0.5;
      return a;
    };
    ap = backtrack(x, dx, ap);
    ad = backtrack(s, ds, ad);
    if (ap <= 1e-14 && ad <= 1e-14) {
      // Both step lengths collapsed: the iteration cannot move. Report the
      // best point visited; degenerate problems (optimum on the cone
      // boundary) routinely end here just short of the strict tolerances.
      x = best_x;
      y = best_y;
      s = best_s;
      bool close = best_score <=
                   100.0 * std::max(settings.feas_tol, settings.gap_tol);
      return finish(close ? SolveStatus::kOptimal
                          : SolveStatus::kNumericalFailure,
                    iter);
    }

    x += Scalar(ap) * dx;
    y += Scalar(ad) * dy;
    s += Scalar(ad) * ds;
  }
  x = best_x;
  y = best_y;
  s = best_s;
  if (best_score <= 100.0 * std::max(settings.feas_tol, settings.gap_tol))
    return finish(SolveStatus::kOptimal, settings.max_iter);
  return finish(SolveStatus::kMaxIterations, settings.max_iter);
}

}  // namespace detail

inline SdpSolution solve(const SdpProblem& problem,
                         const SolveSettings& settings = {}) {
  if (settings.precision == Precision::kLongDouble)
    return detail::solve_impl<long double>(problem, settings);
  return detail::solve_impl<double>(problem, settings);
}

struct CertifyReport {
  double max_constraint_residual = 0.0;
  double min_eig_x = 0.0;
  double min_eig_s = 0.0;
  double max_dual_residual = 0.0;  // || sum y_i A_i - C - S ||_max
  double gap = 0.0;
  bool feasible = true;
};

// Recomputes residuals and eigenvalue bounds of a solution from scratch.
inline CertifyReport certify(const SdpProblem& problem, const SdpSolution& sol,
                             const SolveSettings& settings = {}) {
  CertifyReport rep;
  const int n = problem.n;
  const int m = static_cast<int>(problem.constraints.size());
  for (int i = 0; i < m; ++i) {
    double r = std::abs(problem.constraints[i].dot(sol.x) - problem.rhs(i));
    rep.max_constraint_residual = std::max(rep.max_constraint_residual, r);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> ex(sol.x, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sol.s, Eigen::EigenvaluesOnly);
  rep.min_eig_x = ex.eigenvalues().minCoeff();
  rep.min_eig_s = es.eigenvalues().minCoeff();
  Matrix c = problem.sense == Sense::kMaximize ? problem.objective
                                               : Matrix(-problem.objective);
  Matrix rd = -c - sol.s;
  for (int i = 0; i < m; ++i) problem.constraints[i].add_to(rd, sol.y(i));
  rep.max_dual_residual = rd.cwiseAbs().maxCoeff();
  rep.gap = std::abs(sol.dual_objective - sol.primal_objective);
  double scale = 1.0 + problem.rhs.cwiseAbs().sum();
  rep.feasible = rep.max_constraint_residual <= settings.feas_tol * scale &&
                 rep.min_eig_x >= -settings.feas_tol * scale &&
                 rep.min_eig_s >= -settings.feas_tol * scale;
  return rep;
}

// Sparse SDPA export (".dat-s"), one block, for cross-checks with external
// solvers. SDPA convention is minimization of sum c_i y_i with
// sum y_i F_i - F_0 >= 0; we export the dual of our standard form.
inline void write_sdpa(const SdpProblem& problem, std::ostream& os) {
  const int m = static_cast<int>(problem.constraints.size());
  os << m << " =mDIM\n1 =nBLOCK\n" << problem.n << " =bLOCKsTRUCT\n";
  char buf[64];
  for (int i = 0; i < m; ++i) {
    double v = problem.rhs(i);
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf << (i + 1 < m ? " " : "");
  }
  os << "\n";
  Matrix c = problem.sense == Sense::kMaximize ? problem.objective
                                               : Matrix(-problem.objective);
  for (int r = 0; r < problem.n; ++r)
    for (int col = r; col < problem.n; ++col)
      if (c(r, col) != 0.0) {
        std::snprintf(buf, sizeof(buf), "%.17g", c(r, col));
        os << "0 1 " << r + 1 << " " << col + 1 << " " << buf << "\n";
      }
  for (int i = 0; i < m; ++i) {
    Matrix a = problem.constraints[i].dense(problem.n);
    for (int r = 0; r < problem.n; ++r)
      for (int col = r; col < problem.n; ++col)
        if (a(r, col) != 0.0) {
          std::snprintf(buf, sizeof(buf), "%.17g", a(r, col));
          os << i + 1 << " 1 " << r + 1 << " " << col + 1 << " " << buf
             << "\n";
        }
  }
}

}  // namespace adcert::sdp
