#include "sdenet/likelihood.hpp"

#include "sdenet/error.hpp"

namespace sdenet {

const char* loss_mode_name(LossMode m) {
  return m == LossMode::Discrete ? "discrete" : "continuous";
}

const Eigen::VectorXd& GradientHessian::ground_truth_gradient() const {
  if (!has_ground_truth())
    throw Error("needs-ground-truth", "gradient at the true row requires the true row");
  return G_hat;
}

namespace {

void check_row(const Trajectory& traj, int row) {
  if (row < 0 || row >= traj.p()) throw Error("bad-input", "row index out of range");
}

void check_dim(const Eigen::VectorXd& a, const Trajectory& traj) {
  if (a.size() != traj.p()) throw Error("dimension-mismatch", "coefficient vector has wrong size");
}

// The continuous loss integrates over the finest path available: the
// inner-resolution path when kept, otherwise the eta-spaced samples.
struct PathView {
  const Eigen::MatrixXd& states;
  double step;
};

PathView finest_path(const Trajectory& traj) {
  if (traj.has_inner()) return {traj.inner, traj.delta};
  return {traj.samples, traj.eta};
}

}  // namespace

double discrete_loss(const Eigen::VectorXd& a_r, const Trajectory& traj, int row) {
  check_row(traj, row);
  check_dim(a_r, traj);
  const int n = traj.n();
  if (n < 1) throw Error("bad-input", "need at least one transition");
  const double eta = traj.eta;

  double acc = 0.0;
  for (int t = 0; t < n; ++t) {
    double resid = traj.samples(row, t + 1) - traj.samples(row, t) -
                   eta * a_r.dot(traj.samples.col(t));
    acc += resid * resid;
  }
  return acc / (2.0 * eta * eta * n);
}

double continuous_loss(const Eigen::VectorXd& a_r, const Trajectory& traj, int row) {
  check_row(traj, row);
  check_dim(a_r, traj);
  PathView path = finest_path(traj);
  const int steps = static_cast<int>(path.states.cols()) - 1;
  if (steps < 1) throw Error("bad-input", "need at least one transition");
  const double delta = path.step;
  const double T = delta * steps;

  double quad = 0.0, cross = 0.0;
  for (int s = 0; s < steps; ++s) {
    double ax = a_r.dot(path.states.col(s));
    quad += ax * ax * delta;
    cross += ax * (path.states(row, s + 1) - path.states(row, s));
  }
  return quad / (2.0 * T) - cross / T;
}

GradientHessian gradient_hessian(const Trajectory& traj, int row, LossMode mode,
                                 const Eigen::VectorXd* true_row) {
  check_row(traj, row);
  if (true_row && true_row->size() != traj.p())
    throw Error("dimension-mismatch", "true row has wrong size");

  GradientHessian gh;
  gh.mode = mode;

  if (mode == LossMode::Discrete) {
    const int n = traj.n();
    if (n < 1) throw Error("bad-input", "need at least one transition");
    const double eta = traj.eta;
    auto X = traj.samples.leftCols(n);
    Eigen::VectorXd dxr =
        traj.samples.row(row).segment(1, n) - traj.samples.row(row).segment(0, n);
    gh.Q_hat = (X * X.transpose()) / static_cast<double>(n);
    gh.b = X * dxr / (n * eta);
  } else {
    PathView path = finest_path(traj);
    const int steps = static_cast<int>(path.states.cols()) - 1;
    if (steps < 1) throw Error("bad-input", "need at least one transition");
    const double delta = path.step;
    const double T = delta * steps;
    auto X = path.states.leftCols(steps);
    Eigen::VectorXd dxr =
        path.states.row(row).segment(1, steps) - path.states.row(row).segment(0, steps);
    gh.Q_hat = (X * X.transpose()) * (delta / T);
    gh.b = X * dxr / T;
  }
  gh.Q_hat = ((gh.Q_hat + gh.Q_hat.transpose()) * 0.5).eval();
  if (true_row) gh.G_hat = gh.b - gh.Q_hat * (*true_row);
  return gh;
}

}  // namespace sdenet
