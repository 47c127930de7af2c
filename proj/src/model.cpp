#include "sdenet/model.hpp"

#include <Eigen/Eigenvalues>
#include <limits>
#include <queue>

#include "sdenet/error.hpp"
#include "sdenet/rng.hpp"

namespace sdenet {

const char* ensemble_name(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::BinaryLiteral: return "binary-literal";
    case EnsembleKind::StabilizedBinary: return "stabilized-binary";
    case EnsembleKind::Laplacian: return "laplacian";
    case EnsembleKind::Explicit: return "explicit";
  }
  return "explicit";
}

Eigen::VectorXi SystemModel::signed_row(int r) const {
  Eigen::VectorXi s = Eigen::VectorXi::Zero(p());
  for (int j = 0; j < p(); ++j) {
    double v = A(r, j);
    s(j) = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
  }
  return s;
}

double SystemModel::a_min(int r) const {
  double amin = std::numeric_limits<double>::infinity();
  for (int j : support(r)) amin = std::min(amin, std::abs(A(r, j)));
  return amin;
}

std::vector<std::vector<int>> row_supports(const Eigen::MatrixXd& A) {
  std::vector<std::vector<int>> supports(static_cast<size_t>(A.rows()));
  for (int r = 0; r < A.rows(); ++r)
    for (int j = 0; j < A.cols(); ++j)
      if (A(r, j) != 0.0) supports[static_cast<size_t>(r)].push_back(j);
  return supports;
}

double max_real_eigenvalue(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff();
}

double rho_min(const Eigen::MatrixXd& A) {
  Eigen::MatrixXd sym = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return -es.eigenvalues().maxCoeff();
}

double sigma_max_step(const Eigen::MatrixXd& A, double eta) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(A.rows(), A.cols()) + eta * A;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B.transpose() * B, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

bool is_stable(const Eigen::MatrixXd& A) { return max_real_eigenvalue(A) < 0.0; }

SystemModel make_explicit_model(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw Error("bad-input", "dynamics matrix must be square");
  SystemModel model;
  model.A = A;
  model.supports = row_supports(A);
  model.ensemble.kind = EnsembleKind::Explicit;
  return model;
}

SystemModel make_random_binary_model(int p, double k, std::uint64_t seed, BinaryVariant variant) {
  if (p < 2) throw Error("bad-input", "dimension p must be at least 2");
  if (k < 0.0 || k >= static_cast<double>(p))
    throw Error("bad-input", "edge parameter k must satisfy 0 <= k < p");

  Rng rng(seed);
  const double prob = k / static_cast<double>(p);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (rng.next_uniform() <= prob) A(i, j) = 1.0;

  SystemModel model;
  if (variant == BinaryVariant::Stabilized) {
    double c = A.rowwise().sum().maxCoeff() + 1.0;
    Eigen::MatrixXd sym = 0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    double lmax = es.eigenvalues().maxCoeff();
    if (lmax - c >= 0.0) {
      // heavy column made the row-sum shift insufficient; the inf-norm of the
      // symmetric part always dominates its spectrum
      c = sym.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
    }
    A.diagonal().array() -= c;
    if (lmax - c >= 0.0) throw Error("not-stable", "stabilizing shift failed");
    model.ensemble.kind = EnsembleKind::StabilizedBinary;
  } else {
    model.ensemble.kind = EnsembleKind::BinaryLiteral;
  }
  model.A = std::move(A);
  model.supports = row_supports(model.A);
  return model;
}

namespace {

bool graph_connected(const Eigen::MatrixXi& adj) {
  const int p = static_cast<int>(adj.rows());
  std::vector<char> seen(static_cast<size_t>(p), 0);
  std::queue<int> queue;
  queue.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop();
    for (int u = 0; u < p; ++u) {
      if (adj(v, u) != 0 && !seen[static_cast<size_t>(u)]) {
        seen[static_cast<size_t>(u)] = 1;
        ++reached;
        queue.push(u);
      }
    }
  }
  return reached == p;
}

}  // namespace

SystemModel make_laplacian_model(const Eigen::MatrixXi& adjacency, double m) {
  const int p = static_cast<int>(adjacency.rows());
  if (adjacency.cols() != p || p < 2) throw Error("bad-input", "adjacency must be square, p >= 2");
  if (m <= 0.0) throw Error("bad-input", "m must be positive");
  for (int i = 0; i < p; ++i) {
    if (adjacency(i, i) != 0) throw Error("bad-input", "adjacency must have zero diagonal");
    for (int j = 0; j < p; ++j) {
      if (adjacency(i, j) != adjacency(j, i)) throw Error("bad-input", "adjacency must be symmetric");
      if (adjacency(i, j) != 0 && adjacency(i, j) != 1)
        throw Error("bad-input", "adjacency entries must be 0 or 1");
    }
  }
  if (!graph_connected(adjacency))
    throw Error("disconnected", "laplacian zero eigenvalue has multiplicity > 1");

  Eigen::MatrixXd A = adjacency.cast<double>();
  int max_degree = 0;
  for (int i = 0; i < p; ++i) {
    int deg = adjacency.row(i).sum();
    max_degree = std::max(max_degree, deg);
    A(i, i) = -m - static_cast<double>(deg);
  }

  SystemModel model;
  model.A = std::move(A);
  model.supports = row_supports(model.A);
  model.ensemble.kind = EnsembleKind::Laplacian;
  model.ensemble.m = m;
  model.ensemble.max_degree = max_degree;
  if (max_real_eigenvalue(model.A) >= 0.0) throw Error("not-stable", "laplacian model not stable");
  return model;
}

SystemModel make_random_stable_model(int p, std::uint64_t seed, double margin) {
  if (p < 1) throw Error("bad-input", "dimension p must be at least 1");
  if (margin <= 0.0) throw Error("bad-input", "margin must be positive");
  Rng rng(seed);
  Eigen::MatrixXd A(p, p);
  const double scale = 1.0 / std::sqrt(static_cast<double>(p));
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) A(i, j) = scale * rng.next_gaussian();
  Eigen::MatrixXd sym = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  A.diagonal().array() -= es.eigenvalues().maxCoeff() + margin;
  return make_explicit_model(A);
}

}  // namespace sdenet
