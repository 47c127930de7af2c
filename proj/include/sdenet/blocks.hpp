#pragma once

#include <Eigen/Dense>
#include <vector>

namespace sdenet {

// submatrix Q[rows, cols] in the given index order
inline Eigen::MatrixXd submatrix(const Eigen::MatrixXd& Q, const std::vector<int>& rows,
                                 const std::vector<int>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = Q(rows[i], cols[j]);
  return out;
}

inline std::vector<int> complement_of(const std::vector<int>& idx, int p) {
  std::vector<char> in(p, 0);
  for (int i : idx) in[i] = 1;
  std::vector<int> out;
  out.reserve(p - idx.size());
  for (int i = 0; i < p; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

// operator norm induced by the sup norm: max absolute row sum
inline double inf_operator_norm(const Eigen::MatrixXd& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0.0;
  return M.cwiseAbs().rowwise().sum().maxCoeff();
}

inline double min_eigenvalue(const Eigen::MatrixXd& sym) {
  if (sym.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// 1 - |||Q_{Sc,S} (Q_{S,S})^-1|||_inf
inline double incoherence_alpha(const Eigen::MatrixXd& Q, const std::vector<int>& support) {
  const int p = static_cast<int>(Q.rows());
  std::vector<int> sc = complement_of(support, p);
  if (support.empty() || sc.empty()) return 1.0;
  Eigen::MatrixXd qss = submatrix(Q, support, support);
  Eigen::MatrixXd qcs = submatrix(Q, sc, support);
  Eigen::MatrixXd ratio = qss.ldlt().solve(qcs.transpose()).transpose();
  return 1.0 - inf_operator_norm(ratio);
}

}  // namespace sdenet
