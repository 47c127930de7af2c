#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "sdenet/model.hpp"

namespace sdenet {

enum class Provenance { DiscreteNative, SubsampledContinuous, Coupled };

const char* provenance_name(Provenance p);

// Ordered state samples at spacing eta. For continuous-time generation the
// full inner-resolution path (step delta) is kept when requested, which the
// continuous likelihood needs.
struct Trajectory {
  Eigen::MatrixXd samples;  // p x (n+1), column t holds x(t*eta)
  double eta = 0.0;
  Provenance provenance = Provenance::DiscreteNative;
  std::uint64_t seed = 0;
  double delta = 0.0;       // inner step; equals eta for discrete-native data
  Eigen::MatrixXd inner;    // p x (T/delta + 1) when kept, otherwise empty

  int p() const { return static_cast<int>(samples.rows()); }
  int n() const { return static_cast<int>(samples.cols()) - 1; }
  bool has_inner() const { return inner.size() > 0; }
};

// Symmetric PSD square root by eigendecomposition; eigenvalues clipped at
// 1e-12 so the inverse root stays finite.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& S);
Eigen::MatrixXd psd_inv_sqrt(const Eigen::MatrixXd& S);

// x(t+1) = x(t) + eta A0 x(t) + w(t+1), w ~ N(0, eta I), x(0) stationary.
// eta = 0 degenerates to a constant trajectory drawn from the continuous
// stationary law.
Trajectory simulate_discrete(const SystemModel& model, double eta, int n, std::uint64_t seed);

// Euler-Maruyama at inner step delta from the stationary continuous law,
// subsampled every (eta/delta)-th state. The inner path depends only on
// (model, T, delta, seed), so different eta values share Brownian paths.
Trajectory simulate_continuous(const SystemModel& model, double T, double delta, double eta,
                               std::uint64_t seed, bool keep_inner = false);

// Discrete and continuous trajectories driven by the same Brownian
// increments, with x_disc(0) = Q0(eta)^{1/2} Q0^{-1/2} x_cont(0).
std::pair<Trajectory, Trajectory> simulate_coupled(const SystemModel& model, double T, int n,
                                                   std::uint64_t seed, double delta);

}  // namespace sdenet
