#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "sdenet/likelihood.hpp"
#include "sdenet/model.hpp"

namespace sdenet {

// The four data-dependent sufficient conditions for signed-support recovery:
// gradient small everywhere, gradient extra-small on the support, and the two
// second-moment blocks close to their stationary values.
struct Prop3Report {
  std::array<double, 4> measured{};
  std::array<double, 4> bound{};
  std::array<bool, 4> holds{};
  bool all_hold = false;

  static const char* condition_name(int i);
};

Prop3Report check_prop3(const GradientHessian& gh, const Eigen::MatrixXd& Q0,
                        const std::vector<int>& support, double lambda, double A_min,
                        double C_min, double alpha, int k);

struct ConditionReport {
  int row = 0;
  std::vector<int> support;
  int k = 0;          // |support|
  double A_min = 0.0;  // smallest |A_rj| on the support, 0 if empty
  double failure_prob = 0.1;

  // from the continuous-time stationary covariance
  double C_min = 0.0;
  double alpha = 0.0;
  double rho_min = 0.0;

  // sampled-chain quantities, present when eta was supplied
  std::optional<double> eta;
  std::optional<double> sigma_max;
  std::optional<double> D;
  std::optional<double> c_min_step;
  std::optional<double> alpha_step;

  // minimum observation interval each guarantee demands (unset when the
  // needed scalars are nonpositive or the ensemble does not apply)
  std::optional<double> horizon_continuous;
  std::optional<double> horizon_laplacian;
  std::optional<double> horizon_discrete;

  bool hypothesis_ok = true;  // alpha > 0, C_min > 0, and D > 0 when present
  std::optional<Prop3Report> prop3;
};

ConditionReport compute_condition_report(const SystemModel& model, int row,
                                         std::optional<double> eta = std::nullopt,
                                         double failure_prob = 0.1);

// Monte Carlo tail audit against a closed-form bound.
struct TailStudy {
  double epsilon = 0.0;
  int trials = 0;
  int exceed_count = 0;  // trials where the statistic exceeded epsilon
  double rate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 1.0;
  double bound = 1.0;
  bool bound_violated = false;  // wilson_lo > bound
  Eigen::MatrixXi entry_counts;  // block study only: per-entry exceedances at epsilon/|S|
};

TailStudy empirical_tail_gradient(const SystemModel& model, double eta, int n,
                                  const std::vector<int>& S, double epsilon, int trials,
                                  std::uint64_t seed, int row = 0);

TailStudy empirical_tail_covariance(const SystemModel& model, double eta, int n, int i, int j,
                                    double epsilon, int trials, std::uint64_t seed);

TailStudy empirical_tail_covariance_block(const SystemModel& model, double eta, int n,
                                          const std::vector<int>& J, const std::vector<int>& S,
                                          double epsilon, int trials, std::uint64_t seed);

}  // namespace sdenet
