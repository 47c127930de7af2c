#include "sdenet/simulate.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "sdenet/error.hpp"
#include "sdenet/lyapunov.hpp"
#include "sdenet/rng.hpp"

namespace sdenet {

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::DiscreteNative: return "discrete-native";
    case Provenance::SubsampledContinuous: return "subsampled-continuous";
    case Provenance::Coupled: return "coupled";
  }
  return "discrete-native";
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(1e-12);
  return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd psd_inv_sqrt(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(1e-12);
  return es.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

namespace {

Eigen::VectorXd gaussian_vector(Rng& rng, int p) {
  Eigen::VectorXd g(p);
  for (int i = 0; i < p; ++i) g(i) = rng.next_gaussian();
  return g;
}

int exact_ratio(double outer, double inner, const char* what) {
  double ratio = outer / inner;
  double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw Error("bad-subsampling", std::string(what) + " must be an integer multiple");
  return static_cast<int>(rounded);
}

}  // namespace

Trajectory simulate_discrete(const SystemModel& model, double eta, int n, std::uint64_t seed) {
  if (n < 1) throw Error("bad-input", "need n >= 1 transitions");
  if (eta < 0.0) throw Error("bad-input", "eta must be nonnegative");
  const int p = model.p();

  Trajectory traj;
  traj.eta = eta;
  traj.delta = eta;
  traj.provenance = Provenance::DiscreteNative;
  traj.seed = seed;
  traj.samples.resize(p, n + 1);

  Rng rng(seed);
  if (eta == 0.0) {
    Eigen::MatrixXd root = psd_sqrt(solve_lyapunov_continuous(model).Q);
    Eigen::VectorXd x0 = root * gaussian_vector(rng, p);
    for (int t = 0; t <= n; ++t) traj.samples.col(t) = x0;
    return traj;
  }

  StationaryCovariance cov = solve_lyapunov_discrete(model, eta);
  Eigen::MatrixXd root = psd_sqrt(cov.Q);
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(p, p) + eta * model.A;
  const double noise_sd = std::sqrt(eta);

  traj.samples.col(0) = root * gaussian_vector(rng, p);
  for (int t = 0; t < n; ++t)
    traj.samples.col(t + 1) = B * traj.samples.col(t) + noise_sd * gaussian_vector(rng, p);
  return traj;
}

Trajectory simulate_continuous(const SystemModel& model, double T, double delta, double eta,
                               std::uint64_t seed, bool keep_inner) {
  if (T <= 0.0 || delta <= 0.0 || eta <= 0.0) throw Error("bad-input", "T, delta, eta must be positive");
  if (delta > eta) throw Error("bad-subsampling", "delta must not exceed eta");
  const int stride = exact_ratio(eta, delta, "eta/delta");
  const int n = exact_ratio(T, eta, "T/eta");
  const int n_inner = n * stride;
  const int p = model.p();

  StationaryCovariance cov = solve_lyapunov_continuous(model);
  Eigen::MatrixXd root = psd_sqrt(cov.Q);
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(p, p) + delta * model.A;
  const double noise_sd = std::sqrt(delta);

  Rng rng(seed);
  Eigen::MatrixXd inner(p, n_inner + 1);
  inner.col(0) = root * gaussian_vector(rng, p);
  for (int i = 0; i < n_inner; ++i)
    inner.col(i + 1) = B * inner.col(i) + noise_sd * gaussian_vector(rng, p);

  Trajectory traj;
  traj.eta = eta;
  traj.delta = delta;
  traj.provenance = Provenance::SubsampledContinuous;
  traj.seed = seed;
  traj.samples.resize(p, n + 1);
  for (int t = 0; t <= n; ++t) traj.samples.col(t) = inner.col(t * stride);
  if (keep_inner) traj.inner = std::move(inner);
  return traj;
}

std::pair<Trajectory, Trajectory> simulate_coupled(const SystemModel& model, double T, int n,
                                                   std::uint64_t seed, double delta) {
  if (n < 1) throw Error("bad-input", "need n >= 1 transitions");
  const double eta = T / static_cast<double>(n);
  Trajectory cont = simulate_continuous(model, T, delta, eta, seed, /*keep_inner=*/true);
  cont.provenance = Provenance::Coupled;
  const int p = model.p();
  const int stride = static_cast<int>(std::round(eta / delta));

  StationaryCovariance cov_eta = solve_lyapunov_discrete(model, eta);
  StationaryCovariance cov0 = solve_lyapunov_continuous(model);

  Trajectory disc;
  disc.eta = eta;
  disc.delta = eta;
  disc.provenance = Provenance::Coupled;
  disc.seed = seed;
  disc.samples.resize(p, n + 1);
  disc.samples.col(0) = psd_sqrt(cov_eta.Q) * (psd_inv_sqrt(cov0.Q) * cont.inner.col(0));

  // w(i) = b(Ti/n) - b(T(i-1)/n), recovered from the Euler increments of the
  // shared inner path
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(p, p) + eta * model.A;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
    for (int s = i * stride; s < (i + 1) * stride; ++s)
      w += cont.inner.col(s + 1) - cont.inner.col(s) - delta * (model.A * cont.inner.col(s));
    disc.samples.col(i + 1) = B * disc.samples.col(i) + w;
  }
  return {std::move(disc), std::move(cont)};
}

}  // namespace sdenet
