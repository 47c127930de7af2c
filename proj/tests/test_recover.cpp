#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "sdenet/blocks.hpp"
#include "sdenet/error.hpp"
#include "sdenet/lyapunov.hpp"
#include "sdenet/recover.hpp"
#include "sdenet/rng.hpp"

using namespace sdenet;

namespace {

bool support_within(const Eigen::VectorXi& got, const std::vector<int>& allowed) {
  std::vector<char> ok(got.size(), 0);
  for (int j : allowed) ok[j] = 1;
  for (int j = 0; j < got.size(); ++j)
    if (got(j) != 0 && !ok[j]) return false;
  return true;
}

}  // namespace

TEST_SUITE("recover") {

TEST_CASE("noiseless data recovers the matrix exactly without a penalty") {
  SystemModel model = make_random_stable_model(4, 64);
  Trajectory traj = test_helpers::noiseless_trajectory(model, 0.1, 30, 7);
  NetworkEstimate net = recover_network(traj, LambdaStrategy::fixed(0.0),
                                        LossMode::Discrete, &model, 1e-12);
  REQUIRE(net.p() == 4);
  for (int r = 0; r < 4; ++r) {
    Eigen::VectorXd truth = model.A.row(r).transpose();
    CHECK(test_helpers::max_abs(net.rows[r].estimate.a_hat - truth) < 1e-8);
  }
}

TEST_CASE("the oracle grid finds the signed support of a sparse network") {
  SystemModel model = make_random_binary_model(8, 3.0, 12, BinaryVariant::Stabilized);
  Trajectory traj = simulate_discrete(model, 0.1, 8000, 2026);
  NetworkEstimate net =
      recover_network(traj, LambdaStrategy::oracle_grid(), LossMode::Discrete, &model);
  CHECK(net.truth_known);
  CHECK(net.all_rows_succeed);
  for (int r = 0; r < 8; ++r) {
    CHECK(net.rows[r].success);
    CHECK((net.rows[r].estimate.signed_support.array() == model.signed_row(r).array()).all());
  }
}

TEST_CASE("recovery commutes with relabeling the coordinates") {
  SystemModel model = make_random_stable_model(5, 9);
  Trajectory traj = simulate_discrete(model, 0.1, 1500, 33);

  std::vector<int> perm = {3, 0, 4, 1, 2};
  Trajectory shuffled = traj;
  for (int i = 0; i < 5; ++i) shuffled.samples.row(i) = traj.samples.row(perm[i]);

  LambdaStrategy strategy = LambdaStrategy::fixed(0.05);
  NetworkEstimate base = recover_network(traj, strategy, LossMode::Discrete, nullptr, 1e-10);
  NetworkEstimate moved = recover_network(shuffled, strategy, LossMode::Discrete, nullptr, 1e-10);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(moved.rows[i].estimate.a_hat(j) ==
            doctest::Approx(base.rows[perm[i]].estimate.a_hat(perm[j])).epsilon(1e-6));
}

TEST_CASE("penalty rules pull their inputs from the model") {
  SystemModel model = make_random_stable_model(4, 20);
  Trajectory traj = simulate_discrete(model, 0.1, 500, 3);

  RowRecovery rec = recover_row(traj, 1, LambdaStrategy::from_rule(GuaranteeRule::Discrete),
                                LossMode::Discrete, &model);
  RuleParams params;
  params.p = 4;
  params.failure_prob = 0.1;
  params.horizon = 500 * 0.1;
  params.D = (1.0 - sigma_max_step(model.A, 0.1)) / 0.1;
  params.alpha = incoherence_alpha(solve_lyapunov_discrete(model, 0.1).Q, model.support(1));
  CHECK(rec.lambda_used == doctest::Approx(rule_lambda(params, GuaranteeRule::Discrete))
                               .epsilon(1e-14));

  RowRecovery cont = recover_row(traj, 1, LambdaStrategy::from_rule(GuaranteeRule::Continuous),
                                 LossMode::Discrete, &model);
  RuleParams cp;
  cp.p = 4;
  cp.failure_prob = 0.1;
  cp.horizon = 50.0;
  cp.rho_min = rho_min(model.A);
  cp.alpha = incoherence_alpha(solve_lyapunov_continuous(model).Q, model.support(1));
  CHECK(cont.lambda_used ==
        doctest::Approx(rule_lambda(cp, GuaranteeRule::Continuous)).epsilon(1e-14));
}

TEST_CASE("strategies that need the truth say so") {
  SystemModel model = make_random_stable_model(3, 5);
  Trajectory traj = simulate_discrete(model, 0.1, 100, 8);
  try {
    recover_row(traj, 0, LambdaStrategy::from_rule(GuaranteeRule::Discrete),
                LossMode::Discrete, nullptr);
    FAIL("expected needs-ground-truth");
  } catch (const Error& e) {
    CHECK(e.code() == "needs-ground-truth");
  }
  try {
    recover_row(traj, 0, LambdaStrategy::oracle_grid(), LossMode::Discrete, nullptr);
    FAIL("expected needs-ground-truth");
  } catch (const Error& e) {
    CHECK(e.code() == "needs-ground-truth");
  }
  try {
    recover_row(traj, 0, LambdaStrategy::from_rule(GuaranteeRule::Laplacian),
                LossMode::Discrete, &model);
    FAIL("expected bad-input for a non-laplacian model");
  } catch (const Error& e) {
    CHECK(e.code() == "bad-input");
  }
}

TEST_CASE("the default grid is log spaced below the gradient scale") {
  std::vector<double> grid = default_lambda_grid(2.0);
  REQUIRE(grid.size() == 50);
  CHECK(grid.front() == doctest::Approx(2e-3));
  CHECK(grid.back() == doctest::Approx(2.0));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}

TEST_CASE("dual check on a decoupled instance is exact") {
  GradientHessian gh;
  gh.Q_hat = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd a0(3);
  a0 << 1.0, 0.0, 0.0;
  gh.b = a0;                          // noiseless: b = Q a0
  gh.G_hat = Eigen::VectorXd::Zero(3);  // gradient at the truth

  const double lambda = 0.1;
  RowEstimate est = lasso_quadratic(gh.Q_hat, gh.b, lambda, 1e-12);
  CHECK(est.a_hat(0) == doctest::Approx(0.9).epsilon(1e-12));

  DualCheckReport rep = kkt_dual_check(est, gh, lambda, {0}, 1.0, 1.0, &a0);
  CHECK(rep.z_off_norm == 0.0);
  CHECK(rep.z_bound == 0.0);
  CHECK(rep.g_support_norm == 0.0);
  CHECK(rep.q_ss_min_eigenvalue == doctest::Approx(1.0));
  CHECK(rep.q_ss_well_conditioned);
  CHECK(rep.g_condition_bound == doctest::Approx(1.0 / 2.0 - lambda));
  CHECK(rep.g_condition_holds);
  REQUIRE(rep.sup_error.has_value());
  CHECK(*rep.sup_error == doctest::Approx(lambda).epsilon(1e-10));
  CHECK(*rep.sup_error_within_half_a_min);
}

TEST_CASE("empty support falls back to the off-support gradient") {
  GradientHessian gh;
  gh.Q_hat = Eigen::MatrixXd::Identity(2, 2);
  gh.b = Eigen::VectorXd::Zero(2);
  gh.G_hat = Eigen::VectorXd::Constant(2, 0.02);
  RowEstimate est = lasso_quadratic(gh.Q_hat, gh.b, 0.1);
  DualCheckReport rep = kkt_dual_check(est, gh, 0.1, {}, 1.0, 1.0);
  CHECK(rep.z_bound == doctest::Approx(0.2));
  CHECK(rep.q_ss_well_conditioned);
  CHECK(rep.g_condition_holds);
}

TEST_CASE("a singular on-support block is a typed error") {
  GradientHessian gh;
  gh.Q_hat = Eigen::MatrixXd::Zero(2, 2);
  gh.Q_hat(1, 1) = 1.0;
  gh.b = Eigen::VectorXd::Zero(2);
  gh.G_hat = Eigen::VectorXd::Zero(2);
  RowEstimate est = lasso_quadratic(gh.Q_hat, gh.b, 0.1);
  try {
    kkt_dual_check(est, gh, 0.1, {0}, 1.0, 1.0);
    FAIL("expected singular-block");
  } catch (const Error& e) {
    CHECK(e.code() == "singular-block");
  }
  CHECK_THROWS_AS(kkt_dual_check(est, gh, 0.0, {1}, 1.0, 1.0), Error);
}

TEST_CASE("dual check without the truth gradient is refused") {
  SystemModel model = make_random_stable_model(3, 2);
  Trajectory traj = simulate_discrete(model, 0.1, 200, 4);
  GradientHessian gh = gradient_hessian(traj, 0, LossMode::Discrete);
  RowEstimate est = lasso_quadratic(gh.Q_hat, gh.b, 0.1);
  try {
    kkt_dual_check(est, gh, 0.1, {0}, 1.0, 1.0);
    FAIL("expected needs-ground-truth");
  } catch (const Error& e) {
    CHECK(e.code() == "needs-ground-truth");
  }
}

TEST_CASE("the dual bound dominates the measured dual off the support") {
  // the bound is an identity consequence whenever the estimate stays inside
  // the true support, up to solver tolerance
  int audited = 0;
  for (int trial = 0; trial < 60; ++trial) {
    SystemModel model =
        make_random_binary_model(5, 2.0, derive_seed(500, trial), BinaryVariant::Stabilized);
    Trajectory traj = simulate_discrete(model, 0.1, 2000, derive_seed(501, trial));
    for (int r = 0; r < 5; ++r) {
      const double lambda = 0.15;
      GradientHessian gh = gradient_hessian(traj, r, LossMode::Discrete);
      Eigen::VectorXd truth = model.A.row(r).transpose();
      gh.G_hat = gh.b - gh.Q_hat * truth;
      RowEstimate est = lasso_quadratic(gh.Q_hat, gh.b, lambda, 1e-10);
      if (!support_within(est.signed_support, model.support(r))) continue;
      DualCheckReport rep =
          kkt_dual_check(est, gh, lambda, model.support(r), model.a_min(r), 0.5);
      CHECK(rep.z_slack >= -1e-6);
      ++audited;
    }
  }
  CHECK(audited >= 100);
}

}  // TEST_SUITE
