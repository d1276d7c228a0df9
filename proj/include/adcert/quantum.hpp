#pragma once

// Ideal correlations from states and binary projective measurements via the
// Born rule. Binary measurements are stored as their outcome-0 projector;
// outcome 1 is the complement.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "adcert/correlation.hpp"

namespace adcert {

using Cplx = std::complex<double>;
using MatrixC = Eigen::MatrixXcd;
using VectorC = Eigen::VectorXcd;

inline MatrixC kron(const MatrixC& a, const MatrixC& b) {
  MatrixC out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Outcome-0 projector of a qubit measurement in the x-z plane: projects onto
// cos(theta/2)|0> + sin(theta/2)|1>.
inline MatrixC qubit_projector(double theta) {
  double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  MatrixC p(2, 2);
  p << c * c, c * s, c * s, s * s;
  return p;
}

struct QuantumRealization {
  int dim_a = 2;
  int dim_b = 2;
  MatrixC rho;                         // density matrix on dim_a * dim_b
  std::vector<MatrixC> projectors_a;   // outcome-0 projector per input x
  std::vector<MatrixC> projectors_b;   // outcome-0 projector per input y

  static QuantumRealization from_pure_state(const VectorC& psi, int dim_a,
                                            int dim_b,
                                            std::vector<MatrixC> proj_a,
                                            std::vector<MatrixC> proj_b) {
    if (psi.size() != static_cast<Eigen::Index>(dim_a) * dim_b)
      throw std::invalid_argument("state length does not match dimensions");
    double norm = psi.norm();
    if (std::abs(norm - 1.0) > 1e-9)
      throw std::invalid_argument("state is not normalized");
    QuantumRealization r;
    r.dim_a = dim_a;
    r.dim_b = dim_b;
    r.rho = (psi / norm) * (psi / norm).adjoint();
    r.projectors_a = std::move(proj_a);
    r.projectors_b = std::move(proj_b);
    return r;
  }

  void validate() const {
    if (rho.rows() != rho.cols() ||
        rho.rows() != static_cast<Eigen::Index>(dim_a) * dim_b)
      throw std::invalid_argument("density matrix dimension mismatch");
    if (std::abs(rho.trace().real() - 1.0) > tol::kOperator ||
        std::abs(rho.trace().imag()) > tol::kOperator)
      throw std::invalid_argument("density matrix trace != 1");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol::kOperator)
      throw std::invalid_argument("density matrix not Hermitian");
    Eigen::SelfAdjointEigenSolver<MatrixC> es(rho);
    if (es.eigenvalues().minCoeff() < -1e-10)
      throw std::invalid_argument("density matrix not PSD");
    auto check_projector = [](const MatrixC& p, int dim) {
      if (p.rows() != dim || p.cols() != dim)
        throw std::invalid_argument("projector dimension mismatch");
      if ((p - p.adjoint()).cwiseAbs().maxCoeff() > tol::kOperator ||
          (p * p - p).cwiseAbs().maxCoeff() > tol::kOperator)
        throw std::invalid_argument("measurement is not a projector");
    };
    for (const auto& p : projectors_a) check_projector(p, dim_a);
    for (const auto& p : projectors_b) check_projector(p, dim_b);
  }
};

// p(ab|xy) = tr[rho (Pi_A^{x,a} (x) Pi_B^{y,b})].
inline Correlation born_probabilities(const QuantumRealization& real,
                                      const Scenario& sc) {
  sc.validate();
  real.validate();
  if (static_cast<int>(real.projectors_a.size()) != sc.num_inputs_a ||
      static_cast<int>(real.projectors_b.size()) != sc.num_inputs_b)
    throw std::invalid_argument(
        "born_probabilities: projector count does not match scenario");
  const MatrixC id_a = MatrixC::Identity(real.dim_a, real.dim_a);
  const MatrixC id_b = MatrixC::Identity(real.dim_b, real.dim_b);
  Correlation c(sc.num_inputs_a, sc.num_inputs_b);
  for (int x = 0; x < sc.num_inputs_a; ++x) {
    for (int y = 0; y < sc.num_inputs_b; ++y) {
      for (int a = 0; a < 2; ++a) {
        MatrixC pa = (a == 0) ? real.projectors_a[x]
                              : MatrixC(id_a - real.projectors_a[x]);
        for (int b = 0; b < 2; ++b) {
          MatrixC pb = (b == 0) ? real.projectors_b[y]
                                : MatrixC(id_b - real.projectors_b[y]);
          c.at(a, b, x, y) = (real.rho * kron(pa, pb)).trace().real();
        }
      }
    }
  }
  c.validate();
  return c;
}

// |Phi+> = (|00> + |11>)/sqrt(2).
inline VectorC phi_plus() {
  VectorC psi(4);
  psi << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
  return psi;
}

// cos(Omega)|00> + sin(Omega)|11>.
inline VectorC partially_entangled(double omega) {
  VectorC psi(4);
  psi << std::cos(omega), 0.0, 0.0, std::sin(omega);
  return psi;
}

// sqrt(kappa)(|01> + |10>) + sqrt(1-2 kappa)|11>.
inline VectorC hardy_state(double kappa) {
  if (!(kappa >= 0.0 && kappa <= 0.5))
    throw std::invalid_argument("hardy_state: kappa must lie in [0, 1/2]");
  VectorC psi(4);
  psi << 0.0, std::sqrt(kappa), std::sqrt(kappa), std::sqrt(1.0 - 2.0 * kappa);
  return psi;
}

}  // namespace adcert
