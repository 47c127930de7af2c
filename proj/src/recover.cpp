#include "sdenet/recover.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "sdenet/blocks.hpp"
#include "sdenet/error.hpp"
#include "sdenet/lyapunov.hpp"

namespace sdenet {

LambdaStrategy LambdaStrategy::fixed(double lambda) {
  LambdaStrategy s;
  s.kind = LambdaStrategyKind::Fixed;
  s.lambda = lambda;
  return s;
}

LambdaStrategy LambdaStrategy::from_rule(GuaranteeRule rule, double failure_prob) {
  LambdaStrategy s;
  s.kind = LambdaStrategyKind::Rule;
  s.rule = rule;
  s.failure_prob = failure_prob;
  return s;
}

LambdaStrategy LambdaStrategy::oracle_grid(std::vector<double> grid) {
  LambdaStrategy s;
  s.kind = LambdaStrategyKind::OracleGrid;
  s.grid = std::move(grid);
  return s;
}

std::vector<double> default_lambda_grid(double lambda_max) {
  std::vector<double> grid(50);
  for (int i = 0; i < 50; ++i)
    grid[i] = lambda_max * std::pow(10.0, -3.0 + 3.0 * i / 49.0);
  return grid;
}

namespace {

double rule_lambda_for_row(const Trajectory& traj, int row, const LambdaStrategy& strategy,
                           const SystemModel& truth) {
  RuleParams params;
  params.p = traj.p();
  params.failure_prob = strategy.failure_prob;
  params.horizon = traj.n() * traj.eta;
  switch (strategy.rule) {
    case GuaranteeRule::Continuous: {
      params.rho_min = rho_min(truth.A);
      params.alpha = incoherence_alpha(solve_lyapunov_continuous(truth).Q, truth.support(row));
      break;
    }
    case GuaranteeRule::Discrete: {
      double smax = sigma_max_step(truth.A, traj.eta);
      params.D = (1.0 - smax) / traj.eta;
      params.alpha =
          incoherence_alpha(solve_lyapunov_discrete(truth, traj.eta).Q, truth.support(row));
      break;
    }
    case GuaranteeRule::Laplacian: {
      if (truth.ensemble.kind != EnsembleKind::Laplacian)
        throw Error("bad-input", "laplacian lambda rule needs a laplacian model");
      params.k = truth.ensemble.max_degree;
      params.m = truth.ensemble.m;
      break;
    }
  }
  return rule_lambda(params, strategy.rule);
}

}  // namespace

RowRecovery recover_row(const Trajectory& traj, int row, const LambdaStrategy& strategy,
                        LossMode mode, const SystemModel* truth, double tol, int max_iter) {
  GradientHessian gh = gradient_hessian(traj, row, mode);
  RowRecovery out;
  out.truth_known = truth != nullptr;

  Eigen::VectorXi want;
  if (truth) want = truth->signed_row(row);

  switch (strategy.kind) {
    case LambdaStrategyKind::Fixed: {
      out.estimate = lasso_quadratic(gh.Q_hat, gh.b, strategy.lambda, tol, max_iter);
      out.lambda_used = strategy.lambda;
      break;
    }
    case LambdaStrategyKind::Rule: {
      if (!truth) throw Error("needs-ground-truth", "lambda rules use model quantities");
      double lambda = rule_lambda_for_row(traj, row, strategy, *truth);
      out.estimate = lasso_quadratic(gh.Q_hat, gh.b, lambda, tol, max_iter);
      out.lambda_used = lambda;
      break;
    }
    case LambdaStrategyKind::OracleGrid: {
      if (!truth) throw Error("needs-ground-truth", "oracle grid scores against the true row");
      std::vector<double> grid =
          strategy.grid.empty() ? default_lambda_grid(gh.b.cwiseAbs().maxCoeff())
                                : strategy.grid;
      std::sort(grid.begin(), grid.end(), std::greater<double>());
      Eigen::VectorXd warm = Eigen::VectorXd::Zero(traj.p());
      bool found = false;
      for (double lambda : grid) {
        RowEstimate est = lasso_quadratic(gh.Q_hat, gh.b, lambda, tol, max_iter, &warm);
        warm = est.a_hat;
        bool hit = (est.signed_support.array() == want.array()).all();
        if (hit || !found) {
          out.estimate = std::move(est);
          out.lambda_used = lambda;
          found = true;
        }
        if (hit) break;
      }
      break;
    }
  }

  if (truth) out.success = (out.estimate.signed_support.array() == want.array()).all();
  return out;
}

NetworkEstimate recover_network(const Trajectory& traj, const LambdaStrategy& strategy,
                                LossMode mode, const SystemModel* truth, double tol,
                                int max_iter) {
  const int p = traj.p();
  NetworkEstimate net;
  net.truth_known = truth != nullptr;
  net.rows.resize(p);

  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < p; ++r) {
    try {
      net.rows[r] = recover_row(traj, r, strategy, mode, truth, tol, max_iter);
    } catch (...) {
#pragma omp critical
      {
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  if (truth) {
    net.all_rows_succeed = true;
    for (const auto& row : net.rows) net.all_rows_succeed = net.all_rows_succeed && row.success;
  }
  return net;
}

DualCheckReport kkt_dual_check(const RowEstimate& estimate, const GradientHessian& gh,
                               double lambda, const std::vector<int>& support, double A_min,
                               double C_min, const Eigen::VectorXd* true_row) {
  if (!(lambda > 0.0)) throw Error("bad-input", "dual bound needs lambda > 0");
  const Eigen::VectorXd& G = gh.ground_truth_gradient();
  const int p = static_cast<int>(gh.Q_hat.rows());
  std::vector<int> sc = complement_of(support, p);

  DualCheckReport rep;
  double g_off = 0.0;
  for (int j : sc) g_off = std::max(g_off, std::abs(G(j)));
  for (int j : support) rep.g_support_norm = std::max(rep.g_support_norm, std::abs(G(j)));
  for (int j : sc) rep.z_off_norm = std::max(rep.z_off_norm, std::abs(estimate.dual(j)));

  if (support.empty()) {
    rep.z_bound = g_off / lambda;
    rep.q_ss_min_eigenvalue = std::numeric_limits<double>::infinity();
    rep.q_ss_well_conditioned = true;
    rep.g_condition_bound = std::numeric_limits<double>::infinity();
    rep.g_condition_holds = true;
  } else {
    Eigen::MatrixXd qss = submatrix(gh.Q_hat, support, support);
    rep.q_ss_min_eigenvalue = min_eigenvalue(qss);
    if (!(rep.q_ss_min_eigenvalue > 0.0))
      throw Error("singular-block", "on-support second-moment block is not positive definite");
    rep.q_ss_well_conditioned = rep.q_ss_min_eigenvalue >= C_min / 2.0;
    Eigen::MatrixXd qcs = submatrix(gh.Q_hat, sc, support);
    Eigen::MatrixXd ratio = qss.ldlt().solve(qcs.transpose()).transpose();
    rep.z_bound = inf_operator_norm(ratio) * (1.0 + rep.g_support_norm / lambda) + g_off / lambda;
    rep.g_condition_bound =
        A_min * rep.q_ss_min_eigenvalue / (2.0 * support.size()) - lambda;
    rep.g_condition_holds = rep.g_support_norm <= rep.g_condition_bound;
  }
  rep.z_slack = rep.z_bound - rep.z_off_norm;

  if (true_row) {
    rep.sup_error = (*true_row - estimate.a_hat).cwiseAbs().maxCoeff();
    rep.sup_error_within_half_a_min = *rep.sup_error <= A_min / 2.0;
  }
  return rep;
}

}  // namespace sdenet
