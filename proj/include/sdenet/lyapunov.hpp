#pragma once

#include <Eigen/Dense>

#include "sdenet/model.hpp"

namespace sdenet {

struct StationaryCovariance {
  Eigen::MatrixXd Q;
  enum class Kind { Continuous, Discrete } kind = Kind::Continuous;
  double eta = 0.0;       // sample spacing for the discrete kind
  double residual = 0.0;  // achieved max-abs residual of the defining equation
};

// ‖A Q + Q Aᵀ + I‖_max
double lyapunov_residual_continuous(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

// ‖A Q + Q Aᵀ + η A Q Aᵀ + I‖_max
double lyapunov_residual_discrete(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q, double eta);

// Stationary covariance of dx = A x dt + db: solves A Q + Q Aᵀ + I = 0 by
// Bartels-Stewart on the complex Schur form. Throws `not-stable` when the
// spectrum touches the closed right half-plane.
StationaryCovariance solve_lyapunov_continuous(const SystemModel& model, double tol = 1e-10);

// Stationary covariance of x(t+1) = (I+ηA)x(t) + w, w ~ N(0, ηI): solves
// A Q + Q Aᵀ + η A Q Aᵀ + I = 0 via the squared Smith iteration on the
// equivalent Stein form. η = 0 is the continuous limit and delegates.
// Throws `not-contractive` when the spectral radius of I+ηA is >= 1 (the
// iteration diverges exactly then; σmax may exceed 1 for non-normal steps).
StationaryCovariance solve_lyapunov_discrete(const SystemModel& model, double eta, double tol = 1e-10);

}  // namespace sdenet
