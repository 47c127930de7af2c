#include "sdenet/lasso.hpp"

#include <cmath>

#include "sdenet/error.hpp"

namespace sdenet {

Eigen::VectorXi signed_support_of(const Eigen::VectorXd& a) {
  Eigen::VectorXi s(a.size());
  for (int j = 0; j < a.size(); ++j) s(j) = a(j) > 0.0 ? 1 : (a(j) < 0.0 ? -1 : 0);
  return s;
}

namespace {

double soft_threshold(double x, double lam) {
  if (x > lam) return x - lam;
  if (x < -lam) return x + lam;
  return 0.0;
}

// dual vector and kkt residual from the current gradient g = Qa - b
void certify(const Eigen::VectorXd& a, const Eigen::VectorXd& grad, double lambda,
             RowEstimate& out) {
  const int p = static_cast<int>(a.size());
  out.dual.resize(p);
  double worst = 0.0;
  for (int j = 0; j < p; ++j) {
    double z;
    if (a(j) != 0.0) {
      z = a(j) > 0.0 ? 1.0 : -1.0;
    } else if (lambda > 0.0) {
      z = std::min(1.0, std::max(-1.0, -grad(j) / lambda));
    } else {
      z = 0.0;
    }
    out.dual(j) = z;
    worst = std::max(worst, std::abs(grad(j) + lambda * z));
  }
  out.kkt_residual = worst;
}

}  // namespace

RowEstimate lasso_quadratic(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b, double lambda,
                            double tol, int max_iter, const Eigen::VectorXd* warm_start,
                            bool track_objective) {
  const int p = static_cast<int>(b.size());
  if (Q.rows() != p || Q.cols() != p) throw Error("dimension-mismatch", "Q must be p x p");
  if (lambda < 0.0) throw Error("bad-input", "lambda must be nonnegative");
  if (warm_start && warm_start->size() != p)
    throw Error("dimension-mismatch", "warm start has wrong size");

  RowEstimate est;
  est.lambda = lambda;
  est.a_hat = warm_start ? *warm_start : Eigen::VectorXd::Zero(p);

  Eigen::VectorXd qa = Q * est.a_hat;  // maintained product
  for (int sweep = 0; sweep < max_iter; ++sweep) {
    double max_change = 0.0;
    for (int j = 0; j < p; ++j) {
      const double qjj = Q(j, j);
      const double aj = est.a_hat(j);
      double next;
      if (qjj > 0.0) {
        double partial = b(j) - (qa(j) - qjj * aj);
        next = soft_threshold(partial, lambda) / qjj;
      } else {
        // flat coordinate, nothing to gain from moving it
        next = 0.0;
      }
      if (next != aj) {
        qa += Q.col(j) * (next - aj);
        est.a_hat(j) = next;
        max_change = std::max(max_change, std::abs(next - aj));
      }
    }
    est.iterations = sweep + 1;
    if (track_objective)
      est.objective_trace.push_back(0.5 * est.a_hat.dot(qa) - b.dot(est.a_hat) +
                                    lambda * est.a_hat.lpNorm<1>());
    certify(est.a_hat, qa - b, lambda, est);
    if (est.kkt_residual < tol || max_change < tol) {
      est.converged = true;
      break;
    }
  }
  est.signed_support = signed_support_of(est.a_hat);
  return est;
}

RowEstimate lasso_solve(const RowProblem& problem, double tol, int max_iter) {
  if (!problem.trajectory) throw Error("bad-input", "row problem carries no trajectory");
  GradientHessian gh = gradient_hessian(*problem.trajectory, problem.row, problem.mode);
  return lasso_quadratic(gh.Q_hat, gh.b, problem.lambda, tol, max_iter);
}

}  // namespace sdenet
