#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sdenet/model.hpp"
#include "sdenet/rng.hpp"
#include "sdenet/simulate.hpp"

namespace test_helpers {

// exact zero-noise discrete trajectory: x(t+1) = (I + eta A) x(t)
inline sdenet::Trajectory noiseless_trajectory(const sdenet::SystemModel& model, double eta,
                                               int n, std::uint64_t seed) {
  const int p = model.p();
  sdenet::Rng rng(seed);
  Eigen::VectorXd x0(p);
  for (int i = 0; i < p; ++i) x0(i) = rng.next_gaussian();

  sdenet::Trajectory traj;
  traj.eta = eta;
  traj.delta = eta;
  traj.seed = seed;
  traj.samples.resize(p, n + 1);
  traj.samples.col(0) = x0;
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(p, p) + eta * model.A;
  for (int t = 0; t < n; ++t) traj.samples.col(t + 1) = B * traj.samples.col(t);
  return traj;
}

inline Eigen::VectorXd gaussian_vector(sdenet::Rng& rng, int p) {
  Eigen::VectorXd g(p);
  for (int i = 0; i < p; ++i) g(i) = rng.next_gaussian();
  return g;
}

inline double max_abs(const Eigen::MatrixXd& M) { return M.cwiseAbs().maxCoeff(); }

// Global minimizer of 1/2 a'Qa - b'a + lambda ||a||_1 by brute force over all
// 3^p sign patterns: each pattern's stationarity system yields one candidate,
// the true optimum is among them (its own pattern reproduces it exactly), and
// every candidate's objective is at least the optimal one.
inline Eigen::VectorXd exhaustive_lasso(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b,
                                        double lambda) {
  const int p = static_cast<int>(b.size());
  int total = 1;
  for (int j = 0; j < p; ++j) total *= 3;

  auto objective = [&](const Eigen::VectorXd& a) {
    return 0.5 * a.dot(Q * a) - b.dot(a) + lambda * a.lpNorm<1>();
  };

  Eigen::VectorXd best = Eigen::VectorXd::Zero(p);
  double best_obj = objective(best);
  for (int code = 0; code < total; ++code) {
    int c = code;
    std::vector<int> sign(p);
    std::vector<int> support;
    for (int j = 0; j < p; ++j) {
      sign[j] = c % 3 - 1;
      c /= 3;
      if (sign[j] != 0) support.push_back(j);
    }
    const int k = static_cast<int>(support.size());
    if (k == 0) continue;  // the all-zero pattern is the starting candidate
    Eigen::MatrixXd Qss(k, k);
    Eigen::VectorXd rhs(k);
    for (int i = 0; i < k; ++i) {
      rhs(i) = b(support[i]) - lambda * sign[support[i]];
      for (int j = 0; j < k; ++j) Qss(i, j) = Q(support[i], support[j]);
    }
    Eigen::VectorXd as = Qss.fullPivLu().solve(rhs);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(p);
    for (int i = 0; i < k; ++i) a(support[i]) = as(i);
    double obj = objective(a);
    if (obj < best_obj) {
      best_obj = obj;
      best = a;
    }
  }
  return best;
}

}  // namespace test_helpers
