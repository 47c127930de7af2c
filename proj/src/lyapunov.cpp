#include "sdenet/lyapunov.hpp"

#include <Eigen/Eigenvalues>
#include <complex>
#include <string>

#include "sdenet/error.hpp"

namespace sdenet {

double lyapunov_residual_continuous(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  Eigen::MatrixXd R = A * Q + Q * A.transpose() + Eigen::MatrixXd::Identity(A.rows(), A.cols());
  return R.cwiseAbs().maxCoeff();
}

double lyapunov_residual_discrete(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q, double eta) {
  Eigen::MatrixXd R = A * Q + Q * A.transpose() + eta * A * Q * A.transpose() +
                      Eigen::MatrixXd::Identity(A.rows(), A.cols());
  return R.cwiseAbs().maxCoeff();
}

StationaryCovariance solve_lyapunov_continuous(const SystemModel& model, double tol) {
  const Eigen::MatrixXd& A = model.A;
  const int p = model.p();
  if (max_real_eigenvalue(A) >= 0.0)
    throw Error("not-stable", "spectrum of A0 not in the open left half-plane");

  // A = U T U^*, T upper triangular. A Q + Q A^* = -I becomes
  // T Y + Y T^* = -I with Y = U^* Q U; solve columns right to left.
  Eigen::ComplexSchur<Eigen::MatrixXd> schur(A);
  const Eigen::MatrixXcd& T = schur.matrixT();
  const Eigen::MatrixXcd& U = schur.matrixU();

  Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(p, p);
  Eigen::MatrixXcd C = -Eigen::MatrixXcd::Identity(p, p);
  for (int j = p - 1; j >= 0; --j) {
    Eigen::VectorXcd rhs = C.col(j);
    for (int k = j + 1; k < p; ++k) rhs -= std::conj(T(j, k)) * Y.col(k);
    Eigen::MatrixXcd M = T + std::conj(T(j, j)) * Eigen::MatrixXcd::Identity(p, p);
    Y.col(j) = M.triangularView<Eigen::Upper>().solve(rhs);
  }
  Eigen::MatrixXd Q = (U * Y * U.adjoint()).real();
  Q = 0.5 * (Q + Q.transpose()).eval();

  StationaryCovariance cov;
  cov.Q = std::move(Q);
  cov.kind = StationaryCovariance::Kind::Continuous;
  cov.residual = lyapunov_residual_continuous(A, cov.Q);
  if (cov.residual > tol)
    throw Error("no-convergence",
                "lyapunov solve residual " + std::to_string(cov.residual) + " exceeds tolerance");
  return cov;
}

StationaryCovariance solve_lyapunov_discrete(const SystemModel& model, double eta, double tol) {
  if (eta < 0.0) throw Error("bad-input", "eta must be nonnegative");
  if (eta == 0.0) {
    StationaryCovariance cov = solve_lyapunov_continuous(model, tol);
    cov.kind = StationaryCovariance::Kind::Discrete;
    cov.eta = 0.0;
    return cov;
  }
  const Eigen::MatrixXd& A = model.A;
  const int p = model.p();
  Eigen::MatrixXd step = Eigen::MatrixXd::Identity(p, p) + eta * A;
  if (step.eigenvalues().cwiseAbs().maxCoeff() >= 1.0)
    throw Error("not-contractive", "spectral radius of I + eta A0 is >= 1");

  // Stein form: B Q B^T - Q = -eta I with B = I + eta A, so
  // Q = eta * sum_l B^l (B^T)^l. Squared Smith iteration doubles the
  // partial sum each step: S <- S + P S P^T, P <- P^2.
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(p, p) + eta * A;
  Eigen::MatrixXd S = eta * Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd P = B;
  double residual = lyapunov_residual_discrete(A, S, eta);
  for (int it = 0; it < 200 && residual > tol; ++it) {
    S = (S + P * S * P.transpose()).eval();
    P = (P * P).eval();
    S = (0.5 * (S + S.transpose())).eval();
    residual = lyapunov_residual_discrete(A, S, eta);
  }
  if (residual > tol)
    throw Error("no-convergence",
                "stein iteration residual " + std::to_string(residual) + " exceeds tolerance");

  StationaryCovariance cov;
  cov.Q = std::move(S);
  cov.kind = StationaryCovariance::Kind::Discrete;
  cov.eta = eta;
  cov.residual = residual;
  return cov;
}

}  // namespace sdenet
