#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "sdenet/bounds.hpp"
#include "sdenet/lasso.hpp"
#include "sdenet/likelihood.hpp"
#include "sdenet/model.hpp"
#include "sdenet/simulate.hpp"

namespace sdenet {

enum class LambdaStrategyKind { Fixed, Rule, OracleGrid };

struct LambdaStrategy {
  LambdaStrategyKind kind = LambdaStrategyKind::Fixed;
  double lambda = 0.0;                     // Fixed
  GuaranteeRule rule = GuaranteeRule::Discrete;  // Rule
  double failure_prob = 0.1;               // Rule
  std::vector<double> grid;                 // OracleGrid; empty means default

  static LambdaStrategy fixed(double lambda);
  static LambdaStrategy from_rule(GuaranteeRule rule, double failure_prob = 0.1);
  static LambdaStrategy oracle_grid(std::vector<double> grid = {});
};

// default oracle grid: 50 log-spaced multipliers of ||grad L(0)||_inf
std::vector<double> default_lambda_grid(double lambda_max);

struct RowRecovery {
  RowEstimate estimate;
  bool success = false;       // signed support matches the true row (truth runs only)
  bool truth_known = false;
  double lambda_used = 0.0;
};

struct NetworkEstimate {
  std::vector<RowRecovery> rows;
  bool truth_known = false;
  bool all_rows_succeed = false;

  int p() const { return static_cast<int>(rows.size()); }
};

RowRecovery recover_row(const Trajectory& traj, int row, const LambdaStrategy& strategy,
                        LossMode mode, const SystemModel* truth = nullptr, double tol = 1e-8,
                        int max_iter = 100000);

NetworkEstimate recover_network(const Trajectory& traj, const LambdaStrategy& strategy,
                                LossMode mode = LossMode::Discrete,
                                const SystemModel* truth = nullptr, double tol = 1e-8,
                                int max_iter = 100000);

struct DualCheckReport {
  double z_off_norm = 0.0;       // measured, off-support dual entries
  double z_bound = 0.0;          // incoherence-style upper bound on the above
  double z_slack = 0.0;          // z_bound - z_off_norm
  double g_support_norm = 0.0;
  double g_condition_bound = 0.0;  // A_min lambda_min(Q_SS)/(2|S|) - lambda
  bool g_condition_holds = false;
  double q_ss_min_eigenvalue = 0.0;
  bool q_ss_well_conditioned = false;  // lambda_min(Q_SS) >= C_min/2
  std::optional<double> sup_error;     // ||true row - a_hat||_inf when truth given
  std::optional<bool> sup_error_within_half_a_min;
};

DualCheckReport kkt_dual_check(const RowEstimate& estimate, const GradientHessian& gh,
                               double lambda, const std::vector<int>& support, double A_min,
                               double C_min, const Eigen::VectorXd* true_row = nullptr);

}  // namespace sdenet
