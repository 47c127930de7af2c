#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "sdenet/error.hpp"
#include "sdenet/likelihood.hpp"
#include "sdenet/lyapunov.hpp"
#include "sdenet/model.hpp"
#include "sdenet/rng.hpp"
#include "sdenet/simulate.hpp"

using namespace sdenet;

TEST_SUITE("likelihood") {

TEST_CASE("noiseless data has zero loss at the true row") {
  SystemModel model = make_random_stable_model(4, 8);
  Trajectory traj = test_helpers::noiseless_trajectory(model, 0.1, 100, 9);
  for (int r = 0; r < 4; ++r) {
    Eigen::VectorXd a0 = model.A.row(r).transpose();
    CHECK(discrete_loss(a0, traj, r) < 1e-18);
  }
}

TEST_CASE("zero coefficients reduce to the pure increment term") {
  SystemModel model = make_random_stable_model(3, 2);
  Trajectory traj = simulate_discrete(model, 0.1, 50, 77);
  const int row = 1;
  double want = 0.0;
  for (int t = 0; t < 50; ++t) {
    double d = traj.samples(row, t + 1) - traj.samples(row, t);
    want += d * d;
  }
  want /= 2.0 * 0.1 * 0.1 * 50;
  CHECK(discrete_loss(Eigen::VectorXd::Zero(3), traj, row) ==
        doctest::Approx(want).epsilon(1e-14));

  Trajectory cont = simulate_continuous(model, 5.0, 0.01, 0.1, 77, true);
  CHECK(continuous_loss(Eigen::VectorXd::Zero(3), cont, row) == 0.0);
}

TEST_CASE("the loss is the advertised quadratic") {
  SystemModel model = make_random_stable_model(4, 3);
  Trajectory traj = simulate_discrete(model, 0.1, 200, 5);
  Rng rng(17);
  for (int row = 0; row < 4; ++row) {
    GradientHessian gh = gradient_hessian(traj, row, LossMode::Discrete);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd a = test_helpers::gaussian_vector(rng, 4);
      double direct = discrete_loss(a, traj, row) - discrete_loss(Eigen::VectorXd::Zero(4), traj, row);
      double quad = 0.5 * a.dot(gh.Q_hat * a) - gh.b.dot(a);
      CHECK(std::abs(direct - quad) < 1e-12);
    }
  }
}

TEST_CASE("continuous sums converge at first order on a smooth path") {
  // planar rotation x = (sin t, cos t) over one period: the loss limit is
  // (a1^2 + a2^2)/4 - a2/2, and the left-endpoint error is O(delta)
  const double T = 2.0 * std::numbers::pi;
  Eigen::Vector2d a(1.0, 0.5);
  const double exact = (a(0) * a(0) + a(1) * a(1)) / 4.0 - a(1) / 2.0;

  auto loss_at = [&](int steps) {
    Trajectory traj;
    traj.delta = T / steps;
    traj.eta = T;
    traj.inner.resize(2, steps + 1);
    for (int s = 0; s <= steps; ++s) {
      double t = s * traj.delta;
      traj.inner(0, s) = std::sin(t);
      traj.inner(1, s) = std::cos(t);
    }
    traj.samples = traj.inner.leftCols(2);
    return continuous_loss(a, traj, 0);
  };

  double prev_err = 0.0;
  for (int k = 0; k < 3; ++k) {
    double err = std::abs(loss_at(100 * static_cast<int>(std::pow(10, k))) - exact);
    if (k > 0) {
      double slope = std::log10(prev_err / err);
      CHECK(slope > 0.9);
      CHECK(slope < 1.1);
    }
    prev_err = err;
  }
}

TEST_CASE("at matching resolution the losses differ by the increment term") {
  SystemModel model = make_random_stable_model(3, 44);
  Trajectory traj = simulate_discrete(model, 0.05, 300, 6);
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd a = test_helpers::gaussian_vector(rng, 3);
    int row = trial % 3;
    double lhs = continuous_loss(a, traj, row);
    double rhs = discrete_loss(a, traj, row) - discrete_loss(Eigen::VectorXd::Zero(3), traj, row);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("analytic gradients match finite differences") {
  SystemModel model = make_random_stable_model(4, 12);
  Trajectory disc = simulate_discrete(model, 0.1, 150, 31);
  Trajectory cont = simulate_continuous(model, 10.0, 0.01, 0.1, 31, true);
  Rng rng(3);
  const double h = 1e-5;

  auto check_mode = [&](const Trajectory& traj, LossMode mode, auto loss_fn) {
    for (int trial = 0; trial < 10; ++trial) {
      int row = trial % 4;
      GradientHessian gh = gradient_hessian(traj, row, mode);
      Eigen::VectorXd a = test_helpers::gaussian_vector(rng, 4);
      Eigen::VectorXd grad = gh.Q_hat * a - gh.b;
      for (int j = 0; j < 4; ++j) {
        Eigen::VectorXd ap = a, am = a;
        ap(j) += h;
        am(j) -= h;
        double fd = (loss_fn(ap, traj, row) - loss_fn(am, traj, row)) / (2.0 * h);
        CHECK(std::abs(fd - grad(j)) <= 1e-6 * std::max(1.0, std::abs(grad(j))));
      }
    }
  };
  check_mode(disc, LossMode::Discrete, discrete_loss);
  check_mode(cont, LossMode::Continuous, continuous_loss);
}

TEST_CASE("the empirical hessian estimates the stationary covariance") {
  Eigen::MatrixXd A(3, 3);
  A << -1.5, 0.4, 0, 0.4, -2, 0.2, 0, 0.2, -1;
  SystemModel model = make_explicit_model(A);
  Trajectory traj = simulate_discrete(model, 0.1, 100000, 19);
  GradientHessian gh = gradient_hessian(traj, 0, LossMode::Discrete);
  CHECK(test_helpers::max_abs(gh.Q_hat - solve_lyapunov_discrete(model, 0.1).Q) < 0.05);
}

TEST_CASE("the gradient at the truth is centered") {
  SystemModel model = make_explicit_model(-Eigen::MatrixXd::Identity(2, 2));
  const int reps = 5000, n = 50;
  const double eta = 0.1;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd truth = model.A.row(0).transpose();
  for (int s = 0; s < reps; ++s) {
    Trajectory traj = simulate_discrete(model, eta, n, derive_seed(900, s));
    mean += gradient_hessian(traj, 0, LossMode::Discrete, &truth).ground_truth_gradient();
  }
  mean /= static_cast<double>(reps);
  // per-trial sd is about sqrt(Q0(eta) / (n eta))
  double sd_mean = std::sqrt((1.0 / 1.9) / (n * eta) / reps);
  CHECK(test_helpers::max_abs(mean) < 3.0 * sd_mean);
}

TEST_CASE("input mistakes are typed errors") {
  SystemModel model = make_random_stable_model(3, 1);
  Trajectory traj = simulate_discrete(model, 0.1, 10, 1);

  GradientHessian gh = gradient_hessian(traj, 0, LossMode::Discrete);
  try {
    gh.ground_truth_gradient();
    FAIL("expected needs-ground-truth");
  } catch (const Error& e) {
    CHECK(e.code() == "needs-ground-truth");
  }

  try {
    discrete_loss(Eigen::VectorXd::Zero(5), traj, 0);
    FAIL("expected dimension-mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == "dimension-mismatch");
  }

  CHECK_THROWS_AS(discrete_loss(Eigen::VectorXd::Zero(3), traj, 3), Error);
  CHECK_THROWS_AS(gradient_hessian(traj, -1, LossMode::Discrete), Error);

  Eigen::VectorXd bad_truth = Eigen::VectorXd::Zero(4);
  try {
    gradient_hessian(traj, 0, LossMode::Discrete, &bad_truth);
    FAIL("expected dimension-mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == "dimension-mismatch");
  }
}

}  // TEST_SUITE
