#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sdenet/likelihood.hpp"
#include "sdenet/simulate.hpp"

namespace sdenet {

struct RowProblem {
  const Trajectory* trajectory = nullptr;
  int row = 0;
  double lambda = 0.0;
  LossMode mode = LossMode::Discrete;
};

struct RowEstimate {
  Eigen::VectorXd a_hat;
  Eigen::VectorXi signed_support;
  double lambda = 0.0;
  Eigen::VectorXd dual;  // z from the stationarity condition
  double kkt_residual = 0.0;
  int iterations = 0;  // full coordinate sweeps
  bool converged = false;
  std::vector<double> objective_trace;  // per-sweep, only when requested
};

Eigen::VectorXi signed_support_of(const Eigen::VectorXd& a);

// minimize 1/2 a'Qa - b'a + lambda ||a||_1 by cyclic coordinate descent with
// exact soft-threshold updates.  Ties at the threshold resolve to 0.
RowEstimate lasso_quadratic(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b, double lambda,
                            double tol = 1e-8, int max_iter = 100000,
                            const Eigen::VectorXd* warm_start = nullptr,
                            bool track_objective = false);

RowEstimate lasso_solve(const RowProblem& problem, double tol = 1e-8, int max_iter = 100000);

}  // namespace sdenet
