#pragma once

#include <Eigen/Dense>

#include "sdenet/model.hpp"
#include "sdenet/simulate.hpp"

namespace sdenet {

enum class LossMode { Discrete, Continuous };

const char* loss_mode_name(LossMode m);

// Quadratic data for one row problem.  In both modes the loss is
//   L(a) = 1/2 a' Q_hat a - b' a + const,
// so grad L(a) = Q_hat a - b.  G_hat = -grad L(a0_row) needs the true row and
// is only populated when one is supplied.
struct GradientHessian {
  Eigen::VectorXd G_hat;
  Eigen::VectorXd b;
  Eigen::MatrixXd Q_hat;
  LossMode mode = LossMode::Discrete;

  bool has_ground_truth() const { return G_hat.size() > 0; }
  const Eigen::VectorXd& ground_truth_gradient() const;
};

// (1/(2 eta^2 n)) sum_t { x_r(t+1) - x_r(t) - eta a'x(t) }^2
double discrete_loss(const Eigen::VectorXd& a_r, const Trajectory& traj, int row);

// (1/2T) int (a'x)^2 dt - (1/T) int (a'x) dx_r, both as left-endpoint sums
// over the finest path available: the inner-resolution path when kept,
// otherwise the eta-spaced samples.
double continuous_loss(const Eigen::VectorXd& a_r, const Trajectory& traj, int row);

GradientHessian gradient_hessian(const Trajectory& traj, int row, LossMode mode,
                                 const Eigen::VectorXd* true_row = nullptr);

}  // namespace sdenet
