#include "sdenet/conditions.hpp"

#include <cmath>

#include "sdenet/blocks.hpp"
#include "sdenet/bounds.hpp"
#include "sdenet/error.hpp"
#include "sdenet/lyapunov.hpp"
#include "sdenet/rng.hpp"
#include "sdenet/simulate.hpp"
#include "sdenet/wilson.hpp"

namespace sdenet {

const char* Prop3Report::condition_name(int i) {
  switch (i) {
    case 0: return "gradient-everywhere";
    case 1: return "gradient-on-support";
    case 2: return "second-moment-off-block";
    case 3: return "second-moment-on-block";
  }
  return "";
}

Prop3Report check_prop3(const GradientHessian& gh, const Eigen::MatrixXd& Q0,
                        const std::vector<int>& support, double lambda, double A_min,
                        double C_min, double alpha, int k) {
  const Eigen::VectorXd& G = gh.ground_truth_gradient();
  const int p = static_cast<int>(Q0.rows());
  std::vector<int> sc = complement_of(support, p);

  Prop3Report rep;
  rep.measured[0] = G.cwiseAbs().maxCoeff();
  rep.bound[0] = lambda * alpha / 3.0;

  double gs = 0.0;
  for (int j : support) gs = std::max(gs, std::abs(G(j)));
  rep.measured[1] = gs;
  rep.bound[1] = A_min * C_min / (4.0 * k) - lambda;

  Eigen::MatrixXd dq = gh.Q_hat - Q0;
  rep.measured[2] = inf_operator_norm(submatrix(dq, sc, support));
  rep.measured[3] = inf_operator_norm(submatrix(dq, support, support));
  rep.bound[2] = rep.bound[3] = (alpha / 12.0) * (C_min / std::sqrt(static_cast<double>(k)));

  rep.all_hold = true;
  for (int i = 0; i < 4; ++i) {
    rep.holds[i] = rep.measured[i] <= rep.bound[i];
    rep.all_hold = rep.all_hold && rep.holds[i];
  }
  return rep;
}

ConditionReport compute_condition_report(const SystemModel& model, int row,
                                         std::optional<double> eta, double failure_prob) {
  const int p = model.p();
  if (row < 0 || row >= p) throw Error("bad-input", "row index out of range");

  ConditionReport rep;
  rep.row = row;
  rep.support = model.support(row);
  rep.k = static_cast<int>(rep.support.size());
  rep.failure_prob = failure_prob;
  rep.A_min = 0.0;
  for (int j : rep.support) {
    double v = std::abs(model.A(row, j));
    rep.A_min = rep.A_min == 0.0 ? v : std::min(rep.A_min, v);
  }

  Eigen::MatrixXd Q0 = solve_lyapunov_continuous(model).Q;
  rep.C_min = min_eigenvalue(submatrix(Q0, rep.support, rep.support));
  rep.alpha = incoherence_alpha(Q0, rep.support);
  rep.rho_min = rho_min(model.A);

  if (eta) {
    double smax = sigma_max_step(model.A, *eta);
    rep.eta = *eta;
    rep.sigma_max = smax;
    rep.D = (1.0 - smax) / *eta;
    if (smax < 1.0) {
      Eigen::MatrixXd Qeta = solve_lyapunov_discrete(model, *eta).Q;
      rep.c_min_step = min_eigenvalue(submatrix(Qeta, rep.support, rep.support));
      rep.alpha_step = incoherence_alpha(Qeta, rep.support);
    }
  }

  rep.hypothesis_ok = rep.alpha > 0.0 && rep.C_min > 0.0 && (!rep.D || *rep.D > 0.0);

  if (rep.k > 0 && rep.alpha > 0.0 && rep.rho_min > 0.0 && rep.A_min > 0.0 && rep.C_min > 0.0) {
    BoundParams bp;
    bp.p = p;
    bp.k = rep.k;
    bp.failure_prob = failure_prob;
    bp.alpha = rep.alpha;
    bp.rho_min = rep.rho_min;
    bp.A_min = rep.A_min;
    bp.C_min = rep.C_min;
    rep.horizon_continuous = horizon_bound(bp, GuaranteeRule::Continuous);
  }
  if (model.ensemble.kind == EnsembleKind::Laplacian && model.ensemble.max_degree > 0 &&
      model.ensemble.m > 0) {
    BoundParams bp;
    bp.p = p;
    bp.k = model.ensemble.max_degree;
    bp.m = model.ensemble.m;
    bp.failure_prob = failure_prob;
    rep.horizon_laplacian = horizon_bound(bp, GuaranteeRule::Laplacian);
  }
  if (rep.k > 0 && rep.D && *rep.D > 0.0 && rep.alpha_step && *rep.alpha_step > 0.0 &&
      rep.c_min_step && *rep.c_min_step > 0.0 && rep.A_min > 0.0) {
    BoundParams bp;
    bp.p = p;
    bp.k = rep.k;
    bp.failure_prob = failure_prob;
    bp.alpha = *rep.alpha_step;
    bp.D = *rep.D;
    bp.A_min = rep.A_min;
    bp.C_min = *rep.c_min_step;
    rep.horizon_discrete = horizon_bound(bp, GuaranteeRule::Discrete);
  }
  return rep;
}

namespace {

void finish_study(TailStudy& study) {
  study.rate = study.trials > 0 ? static_cast<double>(study.exceed_count) / study.trials : 0.0;
  WilsonInterval wi = wilson_interval(study.exceed_count, study.trials);
  study.wilson_lo = wi.lo;
  study.wilson_hi = wi.hi;
  study.bound_violated = study.wilson_lo > study.bound;
}

}  // namespace

TailStudy empirical_tail_gradient(const SystemModel& model, double eta, int n,
                                  const std::vector<int>& S, double epsilon, int trials,
                                  std::uint64_t seed, int row) {
  if (!(epsilon < 0.5)) throw Error("out-of-regime", "gradient tail bound assumes epsilon < 1/2");
  double smax = sigma_max_step(model.A, eta);
  if (!(smax < 1.0)) throw Error("out-of-regime", "needs a contractive step matrix");
  if (S.empty()) throw Error("bad-input", "index set must be nonempty");

  TailStudy study;
  study.epsilon = epsilon;
  study.trials = trials;
  study.bound = 2.0 * S.size() * std::exp(-n * (1.0 - smax) * epsilon * epsilon / 4.0);

  Eigen::VectorXd true_row = model.A.row(row).transpose();
  int count = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : count)
  for (int t = 0; t < trials; ++t) {
    Trajectory traj = simulate_discrete(model, eta, n, derive_seed(seed, t));
    GradientHessian gh = gradient_hessian(traj, row, LossMode::Discrete, &true_row);
    double gmax = 0.0;
    for (int j : S) gmax = std::max(gmax, std::abs(gh.G_hat(j)));
    if (gmax > epsilon) ++count;
  }
  study.exceed_count = count;
  finish_study(study);
  return study;
}

TailStudy empirical_tail_covariance(const SystemModel& model, double eta, int n, int i, int j,
                                    double epsilon, int trials, std::uint64_t seed) {
  double smax = sigma_max_step(model.A, eta);
  if (!(smax < 1.0)) throw Error("out-of-regime", "needs a contractive step matrix");
  const double D = (1.0 - smax) / eta;
  if (!(n * eta > 3.0 / D)) throw Error("out-of-regime", "needs n*eta > 3/D");
  if (!(epsilon > 0.0 && epsilon < 2.0 / D)) throw Error("out-of-regime", "needs epsilon in (0, 2/D)");

  TailStudy study;
  study.epsilon = epsilon;
  study.trials = trials;
  study.bound =
      2.0 * std::exp(-(n / (32.0 * eta * eta)) * std::pow(1.0 - smax, 3.0) * epsilon * epsilon);

  const double q0ij = solve_lyapunov_discrete(model, eta).Q(i, j);
  int count = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : count)
  for (int t = 0; t < trials; ++t) {
    Trajectory traj = simulate_discrete(model, eta, n, derive_seed(seed, t));
    GradientHessian gh = gradient_hessian(traj, 0, LossMode::Discrete);
    if (std::abs(gh.Q_hat(i, j) - q0ij) > epsilon) ++count;
  }
  study.exceed_count = count;
  finish_study(study);
  return study;
}

TailStudy empirical_tail_covariance_block(const SystemModel& model, double eta, int n,
                                          const std::vector<int>& J, const std::vector<int>& S,
                                          double epsilon, int trials, std::uint64_t seed) {
  double smax = sigma_max_step(model.A, eta);
  if (!(smax < 1.0)) throw Error("out-of-regime", "needs a contractive step matrix");
  const double D = (1.0 - smax) / eta;
  const double k = static_cast<double>(S.size());
  if (S.empty() || J.empty()) throw Error("bad-input", "index sets must be nonempty");
  if (!(n * eta > 3.0 / D)) throw Error("out-of-regime", "needs n*eta > 3/D");
  if (!(epsilon > 0.0 && epsilon < 2.0 * k / D))
    throw Error("out-of-regime", "needs epsilon in (0, 2k/D)");

  TailStudy study;
  study.epsilon = epsilon;
  study.trials = trials;
  study.bound = 2.0 * J.size() * k *
                std::exp(-(n / (32.0 * k * k * eta * eta)) * std::pow(1.0 - smax, 3.0) *
                         epsilon * epsilon);

  Eigen::MatrixXd q0 = solve_lyapunov_discrete(model, eta).Q;
  Eigen::MatrixXd q0block = submatrix(q0, J, S);
  const double per_entry = epsilon / k;

  int count = 0;
  Eigen::MatrixXi entries = Eigen::MatrixXi::Zero(J.size(), S.size());
#pragma omp parallel
  {
    Eigen::MatrixXi local = Eigen::MatrixXi::Zero(J.size(), S.size());
#pragma omp for schedule(dynamic) reduction(+ : count)
    for (int t = 0; t < trials; ++t) {
      Trajectory traj = simulate_discrete(model, eta, n, derive_seed(seed, t));
      GradientHessian gh = gradient_hessian(traj, 0, LossMode::Discrete);
      Eigen::MatrixXd diff = submatrix(gh.Q_hat, J, S) - q0block;
      if (inf_operator_norm(diff) > epsilon) ++count;
      for (int a = 0; a < diff.rows(); ++a)
        for (int b = 0; b < diff.cols(); ++b)
          if (std::abs(diff(a, b)) > per_entry) ++local(a, b);
    }
#pragma omp critical
    entries += local;
  }
  study.exceed_count = count;
  study.entry_counts = entries;
  finish_study(study);
  return study;
}

}  // namespace sdenet
