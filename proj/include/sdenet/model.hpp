#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace sdenet {

enum class EnsembleKind { BinaryLiteral, StabilizedBinary, Laplacian, Explicit };

struct Ensemble {
  EnsembleKind kind = EnsembleKind::Explicit;
  double m = 0.0;      // laplacian: strength of the pull toward the origin
  int max_degree = 0;  // laplacian: max vertex degree of the generating graph
};

const char* ensemble_name(EnsembleKind kind);

// Dynamics matrix A0 with per-row support metadata. supports[r] is exactly
// the set of nonzero columns of row r.
struct SystemModel {
  Eigen::MatrixXd A;
  std::vector<std::vector<int>> supports;
  Ensemble ensemble;

  int p() const { return static_cast<int>(A.rows()); }
  const std::vector<int>& support(int r) const { return supports[static_cast<size_t>(r)]; }

  // sign pattern of row r with sign(0) = 0
  Eigen::VectorXi signed_row(int r) const;

  // smallest |A_rj| over the support of row r (+inf for an empty row)
  double a_min(int r) const;
};

enum class BinaryVariant { BinaryLiteral, Stabilized };

// Entries drawn 1 with probability k/p independently. The stabilized variant
// subtracts c*I with c = (max row sum + 1); if that shift does not make the
// symmetric part negative definite (possible when a column is unusually
// heavy) c is raised to |||sym part|||_inf + 1, which always does.
SystemModel make_random_binary_model(int p, double k, std::uint64_t seed, BinaryVariant variant);

// A0 = -m*I + laplacian(adjacency). Requires a connected simple graph, m > 0.
SystemModel make_laplacian_model(const Eigen::MatrixXi& adjacency, double m);

SystemModel make_explicit_model(const Eigen::MatrixXd& A);

// dense gaussian entries shifted so the symmetric part is negative definite
// with the given margin; handy for randomized verification
SystemModel make_random_stable_model(int p, std::uint64_t seed, double margin = 0.5);

std::vector<std::vector<int>> row_supports(const Eigen::MatrixXd& A);

// spectral helpers
double max_real_eigenvalue(const Eigen::MatrixXd& A);
double rho_min(const Eigen::MatrixXd& A);                   // -λmax((A+Aᵀ)/2)
double sigma_max_step(const Eigen::MatrixXd& A, double eta); // σmax(I + ηA)
bool is_stable(const Eigen::MatrixXd& A);

}  // namespace sdenet
