#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "sdenet/blocks.hpp"
#include "sdenet/conditions.hpp"
#include "sdenet/error.hpp"
#include "sdenet/lyapunov.hpp"
#include "sdenet/model.hpp"
#include "sdenet/rng.hpp"
#include "sdenet/verify.hpp"

using namespace sdenet;

TEST_SUITE("conditions") {

TEST_CASE("decoupled dynamics give the textbook scalars") {
  SystemModel model = make_explicit_model(-Eigen::MatrixXd::Identity(3, 3));
  ConditionReport rep = compute_condition_report(model, 0);
  CHECK(rep.k == 1);
  CHECK(rep.A_min == 1.0);
  CHECK(rep.alpha == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.C_min == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rep.rho_min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.hypothesis_ok);
  CHECK_FALSE(rep.eta.has_value());
  CHECK_FALSE(rep.horizon_discrete.has_value());
  REQUIRE(rep.horizon_continuous.has_value());
  CHECK(*rep.horizon_continuous > 0.0);
}

TEST_CASE("sampling at a contractive step fills the chain quantities") {
  SystemModel model = make_explicit_model(-Eigen::MatrixXd::Identity(3, 3));
  ConditionReport rep = compute_condition_report(model, 1, 0.1);
  REQUIRE(rep.sigma_max.has_value());
  CHECK(*rep.sigma_max == doctest::Approx(0.9).epsilon(1e-12));
  REQUIRE(rep.D.has_value());
  CHECK(*rep.D == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(rep.c_min_step.has_value());
  CHECK(*rep.c_min_step == doctest::Approx(1.0 / 1.9).epsilon(1e-12));
  REQUIRE(rep.alpha_step.has_value());
  CHECK(*rep.alpha_step == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.hypothesis_ok);
  REQUIRE(rep.horizon_discrete.has_value());
}

TEST_CASE("an expansive step flags the hypothesis instead of erroring") {
  SystemModel model = make_explicit_model(-Eigen::MatrixXd::Identity(2, 2));
  ConditionReport rep = compute_condition_report(model, 0, 2.5);
  REQUIRE(rep.D.has_value());
  CHECK(*rep.D < 0.0);
  CHECK_FALSE(rep.c_min_step.has_value());
  CHECK_FALSE(rep.alpha_step.has_value());
  CHECK_FALSE(rep.horizon_discrete.has_value());
  CHECK_FALSE(rep.hypothesis_ok);
}

TEST_CASE("incoherence of homogeneous networks clears the degree bound") {
  // cycle on six nodes, every degree 2
  Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(6, 6);
  for (int i = 0; i < 6; ++i) {
    adj(i, (i + 1) % 6) = 1;
    adj((i + 1) % 6, i) = 1;
  }
  SystemModel model = make_laplacian_model(adj, 2.0);
  for (int r = 0; r < 6; ++r) {
    ConditionReport rep = compute_condition_report(model, r);
    CHECK(rep.alpha >= 2.0 / (2.0 + 2.0) - 1e-12);
    CHECK(rep.hypothesis_ok);
    REQUIRE(rep.horizon_laplacian.has_value());
  }

  for (int s = 0; s < 5; ++s) {
    Eigen::MatrixXi g = random_connected_graph(8, 3, derive_seed(60, s));
    SystemModel lap = make_laplacian_model(g, 1.5);
    double bound = 1.5 / (lap.ensemble.max_degree + 1.5);
    for (int r = 0; r < 8; ++r)
      CHECK(compute_condition_report(lap, r).alpha >= bound - 1e-12);
  }
}

TEST_CASE("alpha agrees with the block-ratio route") {
  SystemModel model = make_random_binary_model(6, 2.0, 17, BinaryVariant::Stabilized);
  Eigen::MatrixXd Q0 = solve_lyapunov_continuous(model).Q;
  for (int r = 0; r < 6; ++r) {
    ConditionReport rep = compute_condition_report(model, r);
    CHECK(rep.alpha == doctest::Approx(incoherence_alpha(Q0, model.support(r))).epsilon(1e-12));
    CHECK(rep.alpha <= 1.0);
  }
}

TEST_CASE("the conditioning product stays below one") {
  for (int s = 0; s < 20; ++s) {
    SystemModel model = make_random_stable_model(4 + s % 4, derive_seed(61, s));
    double eta = 0.1;
    while (sigma_max_step(model.A, eta) >= 1.0) eta /= 2.0;
    ConditionReport rep = compute_condition_report(model, 0, eta);
    REQUIRE(rep.c_min_step.has_value());
    REQUIRE(rep.D.has_value());
    CHECK(*rep.c_min_step * *rep.D <= 1.0 + 1e-9);
  }
}

TEST_CASE("the four recovery conditions are measured as specified") {
  GradientHessian gh;
  Eigen::MatrixXd Q0 = Eigen::MatrixXd::Identity(3, 3);
  gh.Q_hat = Q0;
  gh.Q_hat(0, 1) = gh.Q_hat(1, 0) = 0.01;
  gh.Q_hat(2, 0) = gh.Q_hat(0, 2) = 0.02;
  gh.G_hat = Eigen::VectorXd(3);
  gh.G_hat << 0.01, -0.02, 0.03;

  const std::vector<int> support = {0, 1};
  const double lambda = 0.1, A_min = 1.0, C_min = 1.0, alpha = 1.0;
  Prop3Report rep = check_prop3(gh, Q0, support, lambda, A_min, C_min, alpha, 2);

  CHECK(rep.measured[0] == doctest::Approx(0.03));
  CHECK(rep.bound[0] == doctest::Approx(lambda * alpha / 3.0));
  CHECK(rep.measured[1] == doctest::Approx(0.02));
  CHECK(rep.bound[1] == doctest::Approx(A_min * C_min / 8.0 - lambda));
  // off block {2} x {0,1}: row sum |0.02| + 0; on block rows sum to 0.01
  CHECK(rep.measured[2] == doctest::Approx(0.02));
  CHECK(rep.measured[3] == doctest::Approx(0.01));
  CHECK(rep.bound[2] == doctest::Approx(alpha / 12.0 * C_min / std::sqrt(2.0)));
  CHECK(rep.bound[3] == rep.bound[2]);
  CHECK(rep.holds[0]);
  CHECK(rep.holds[1]);
  CHECK(rep.holds[2]);
  CHECK(rep.holds[3]);
  CHECK(rep.all_hold);

  Prop3Report fail = check_prop3(gh, Q0, support, 1.0, A_min, C_min, alpha, 2);
  CHECK_FALSE(fail.holds[1]);  // bound goes negative at large lambda
  CHECK_FALSE(fail.all_hold);

  for (int i = 0; i < 4; ++i) CHECK(std::string(Prop3Report::condition_name(i)).size() > 0);
}

TEST_CASE("the advertised penalty leaves support-gradient headroom") {
  // at lambda = A_min C_min / (8k) the support condition demands no more
  // than the everywhere condition scaled by 3/alpha
  const double A_min = 0.8, C_min = 0.6;
  const int k = 3;
  double lambda = A_min * C_min / (8.0 * k);
  GradientHessian gh;
  gh.Q_hat = Eigen::MatrixXd::Identity(4, 4);
  gh.G_hat = Eigen::VectorXd::Zero(4);
  Prop3Report rep = check_prop3(gh, Eigen::MatrixXd::Identity(4, 4), {0, 1, 2}, lambda, A_min,
                                C_min, 0.5, k);
  CHECK(rep.bound[1] == doctest::Approx(lambda).epsilon(1e-12));
  CHECK(rep.all_hold);
}

TEST_CASE("gradient tails shrink with the horizon and respect the bound") {
  SystemModel model = make_explicit_model(-Eigen::MatrixXd::Identity(1, 1));
  const double eta = 0.1, eps = 0.2;
  double prev_rate = 1.0;
  for (int n : {200, 800, 3200}) {
    TailStudy study = empirical_tail_gradient(model, eta, n, {0}, eps, 400, 7777);
    double smax = 0.9;
    double want = 2.0 * std::exp(-n * (1.0 - smax) * eps * eps / 4.0);
    CHECK(study.bound == doctest::Approx(want).epsilon(1e-9));
    CHECK_FALSE(study.bound_violated);
    CHECK(study.wilson_lo <= study.bound);
    CHECK(study.rate <= prev_rate);
    prev_rate = study.rate;
  }
}

TEST_CASE("covariance tails respect the bound when it is informative") {
  SystemModel model = make_explicit_model(-Eigen::MatrixXd::Identity(1, 1));
  const double eta = 0.1;
  const int n = 10000;
  TailStudy study = empirical_tail_covariance(model, eta, n, 0, 0, 0.5, 200, 991);
  double smax = 0.9;
  double want = 2.0 * std::exp(-(n / (32.0 * eta * eta)) * std::pow(1.0 - smax, 3.0) * 0.25);
  CHECK(study.bound == doctest::Approx(want).epsilon(1e-6));
  CHECK(study.bound < 1e-3);  // informative, not vacuous
  CHECK(study.exceed_count == 0);
  CHECK_FALSE(study.bound_violated);
}

TEST_CASE("block tails count per-entry exceedances consistently") {
  Eigen::MatrixXd A(3, 3);
  A << -2, 0.3, 0, 0.3, -2, 0.3, 0, 0.3, -2;
  SystemModel model = make_explicit_model(A);
  std::vector<int> J = {0};
  std::vector<int> S = {0, 1};
  TailStudy study = empirical_tail_covariance_block(model, 0.1, 1000, J, S, 0.3, 150, 31);
  REQUIRE(study.entry_counts.rows() == 1);
  REQUIRE(study.entry_counts.cols() == 2);
  // a row-sum exceedance forces at least one entry past epsilon/k
  CHECK(study.exceed_count <= study.entry_counts.sum());
  CHECK_FALSE(study.bound_violated);

  double smax = sigma_max_step(A, 0.1);
  double want = 2.0 * 1.0 * 2.0 *
                std::exp(-(1000.0 / (32.0 * 4.0 * 0.01)) * std::pow(1.0 - smax, 3.0) * 0.09);
  CHECK(study.bound == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("out-of-regime tail requests are refused") {
  SystemModel model = make_explicit_model(-Eigen::MatrixXd::Identity(1, 1));
  auto expect_regime = [](auto fn) {
    try {
      fn();
      FAIL("expected out-of-regime");
    } catch (const Error& e) {
      CHECK(e.code() == "out-of-regime");
    }
  };
  expect_regime([&] { empirical_tail_gradient(model, 0.1, 100, {0}, 0.5, 10, 1); });
  expect_regime([&] { empirical_tail_gradient(model, 2.5, 100, {0}, 0.2, 10, 1); });
  // D = 1 at eta = 0.1: n*eta must exceed 3
  expect_regime([&] { empirical_tail_covariance(model, 0.1, 20, 0, 0, 0.5, 10, 1); });
  expect_regime([&] { empirical_tail_covariance(model, 0.1, 1000, 0, 0, 2.5, 10, 1); });
  expect_regime([&] {
    empirical_tail_covariance_block(model, 0.1, 1000, {0}, {0}, 2.5, 10, 1);
  });
  CHECK_THROWS_AS(empirical_tail_gradient(model, 0.1, 100, {}, 0.2, 10, 1), Error);
  CHECK_THROWS_AS(compute_condition_report(model, 5), Error);
}

}  // TEST_SUITE
