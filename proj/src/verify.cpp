#include "sdenet/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sdenet/blocks.hpp"
#include "sdenet/error.hpp"
#include "sdenet/lyapunov.hpp"
#include "sdenet/rng.hpp"

namespace sdenet {

DecompositionReport verify_decomposition(const Eigen::MatrixXd& Q_hat, const Eigen::MatrixXd& Q0,
                                         const std::vector<int>& S) {
  const int p = static_cast<int>(Q0.rows());
  if (Q_hat.rows() != p || Q_hat.cols() != p)
    throw Error("dimension-mismatch", "matrices must share a dimension");
  std::vector<int> sc = complement_of(S, p);

  DecompositionReport rep;
  if (S.empty() || sc.empty()) {
    rep.identity_ok = rep.bounds_ok = rep.precondition_ok = true;
    return rep;
  }

  Eigen::MatrixXd q0ss = submatrix(Q0, S, S);
  Eigen::MatrixXd qhss = submatrix(Q_hat, S, S);
  Eigen::MatrixXd q0cs = submatrix(Q0, sc, S);
  Eigen::MatrixXd qhcs = submatrix(Q_hat, sc, S);

  const double c_min = min_eigenvalue(q0ss);
  const double h_min = min_eigenvalue(qhss);
  if (!(h_min > 0.0) || !(c_min > 0.0)) throw Error("singular-block", "on-support block singular");

  Eigen::MatrixXd inv0 = q0ss.inverse();
  Eigen::MatrixXd invh = qhss.inverse();
  Eigen::MatrixXd dinv = invh - inv0;

  Eigen::MatrixXd t1 = q0cs * dinv;
  Eigen::MatrixXd t2 = (qhcs - q0cs) * inv0;
  Eigen::MatrixXd t3 = (qhcs - q0cs) * dinv;
  Eigen::MatrixXd lhs = qhcs * invh;
  Eigen::MatrixXd rhs = t1 + t2 + t3 + q0cs * inv0;
  rep.identity_residual = (lhs - rhs).cwiseAbs().maxCoeff();
  rep.identity_ok = rep.identity_residual <= 1e-10;

  const double k = static_cast<double>(S.size());
  const double dss = inf_operator_norm(qhss - q0ss);
  const double dcs = inf_operator_norm(qhcs - q0cs);
  rep.term_norm = {inf_operator_norm(t1), inf_operator_norm(t2), inf_operator_norm(t3)};
  rep.term_bound = {2.0 * std::sqrt(k) / c_min * dss, std::sqrt(k) / c_min * dcs,
                    2.0 * std::sqrt(k) / (c_min * c_min) * dcs * dss};

  rep.precondition_ok =
      inf_operator_norm(q0cs * inv0) < 1.0 && h_min >= c_min / 2.0 && c_min > 0.0;
  rep.bounds_ok = true;
  for (int t = 0; t < 3; ++t)
    rep.bounds_ok = rep.bounds_ok && rep.term_norm[t] <= rep.term_bound[t] + 1e-12;
  return rep;
}

namespace {

// rows of successive powers: out[tau] = e_j' (I + eta A)^tau
std::vector<Eigen::RowVectorXd> row_powers(const Eigen::MatrixXd& B, int j, int count) {
  std::vector<Eigen::RowVectorXd> out(count);
  Eigen::RowVectorXd cur = Eigen::RowVectorXd::Zero(B.cols());
  cur(j) = 1.0;
  for (int t = 0; t < count; ++t) {
    out[t] = cur;
    cur = cur * B;
  }
  return out;
}

constexpr int kSpectralDimCap = 200;

}  // namespace

Eigen::MatrixXd gradient_form_matrix(const SystemModel& model, double eta, int n, int m, int r,
                                     int j) {
  const int p = model.p();
  const int dim = p * (n + m + 1);
  if (dim > kSpectralDimCap) throw Error("too-large", "quadratic-form matrix dimension over cap");
  if (r < 0 || r >= p || j < 0 || j >= p) throw Error("bad-input", "row index out of range");

  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(p, p) + eta * model.A;
  auto rows = row_powers(B, j, n + m);
  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(dim, dim);
  for (int b = m + 1; b <= n + m; ++b)
    for (int c = 0; c < b; ++c) raw.block(b * p + r, c * p, 1, p) = rows[b - 1 - c];
  return 0.5 * (raw + raw.transpose());
}

Eigen::MatrixXd hessian_form_matrix(const SystemModel& model, double eta, int n, int m, int i,
                                    int j) {
  const int p = model.p();
  const int dim = p * (n + m);
  if (dim > kSpectralDimCap) throw Error("too-large", "quadratic-form matrix dimension over cap");
  if (i < 0 || i >= p || j < 0 || j >= p) throw Error("bad-input", "row index out of range");

  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(p, p) + eta * model.A;
  auto rows_i = row_powers(B, i, n + m);
  auto rows_j = row_powers(B, j, n + m);
  Eigen::MatrixXd phi_i = Eigen::MatrixXd::Zero(n, dim);
  Eigen::MatrixXd phi_j = Eigen::MatrixXd::Zero(n, dim);
  for (int t = 0; t < n; ++t)
    for (int c = 0; c <= m + t; ++c) {
      phi_i.block(t, c * p, 1, p) = rows_i[m + t - c];
      phi_j.block(t, c * p, 1, p) = rows_j[m + t - c];
    }
  return 0.5 * (phi_j.transpose() * phi_i + phi_i.transpose() * phi_j);
}

SpectralReport verify_spectral_lemmas(const SystemModel& model, double eta, int n, int m, int r,
                                      int j, int i) {
  SpectralReport rep;
  rep.sigma_max = sigma_max_step(model.A, eta);
  if (!(rep.sigma_max < 1.0)) throw Error("not-contractive", "needs sigma_max < 1");
  const double gap = 1.0 - rep.sigma_max;

  Eigen::MatrixXd rg = gradient_form_matrix(model, eta, n, m, r, j);
  rep.dim_gradient = static_cast<int>(rg.rows());
  rep.trace_gradient = rg.trace();
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rg, Eigen::EigenvaluesOnly);
    rep.max_abs_eig_gradient = es.eigenvalues().cwiseAbs().maxCoeff();
    rep.sum_sq_eig_gradient = es.eigenvalues().squaredNorm();
  }
  rep.bound_max_gradient = 1.0 / gap;
  rep.bound_sum_sq_gradient = 0.5 * n / gap;

  Eigen::MatrixXd rh = hessian_form_matrix(model, eta, n, m, i, j);
  rep.dim_hessian = static_cast<int>(rh.rows());
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rh, Eigen::EigenvaluesOnly);
    rep.max_abs_eig_hessian = es.eigenvalues().cwiseAbs().maxCoeff();
    rep.mean_sq_eig_hessian = es.eigenvalues().squaredNorm() / n;
  }
  rep.bound_max_hessian = 1.0 / (gap * gap);
  rep.bound_mean_sq_hessian = 2.0 / (gap * gap * gap) * (1.0 + 1.5 / (n * gap));

  const double slack = 1e-9;
  rep.all_ok = rep.trace_gradient == 0.0 &&
               rep.max_abs_eig_gradient <= rep.bound_max_gradient + slack &&
               rep.sum_sq_eig_gradient <= rep.bound_sum_sq_gradient + slack &&
               rep.max_abs_eig_hessian <= rep.bound_max_hessian + slack &&
               rep.mean_sq_eig_hessian <= rep.bound_mean_sq_hessian + slack;
  return rep;
}

BiasReport verify_bias_bound(const SystemModel& model, double eta, int n, int m, int i, int j,
                             int trials, std::uint64_t seed) {
  const int p = model.p();
  if (i < 0 || i >= p || j < 0 || j >= p) throw Error("bad-input", "index out of range");
  const double smax = sigma_max_step(model.A, eta);
  if (!(smax < 1.0)) throw Error("not-contractive", "needs sigma_max < 1");

  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(p, p) + eta * model.A;
  const int window = n + m;

  BiasReport rep;
  // windowed series: power term l carries weight (n+m-l)/(n+m)
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd stationary_series = Eigen::MatrixXd::Zero(p, p);
  for (int l = 0; l < window; ++l) {
    Eigen::MatrixXd term = power * power.transpose();
    rep.expected_qij += eta * (static_cast<double>(window - l) / window) * term(i, j);
    stationary_series += eta * term;
    power = B * power;
  }
  for (int l = window; l < 100000; ++l) {
    Eigen::MatrixXd term = eta * power * power.transpose();
    if (term.cwiseAbs().maxCoeff() < 1e-16) break;
    stationary_series += term;
    power = B * power;
  }
  rep.stationary_qij = stationary_series(i, j);
  rep.bias = std::abs(rep.expected_qij - rep.stationary_qij);
  rep.bound = eta / (window * (1.0 - smax) * (1.0 - smax));
  rep.within = rep.bias <= rep.bound + 1e-14;
  rep.series_vs_solver =
      (stationary_series - solve_lyapunov_discrete(model, eta).Q).cwiseAbs().maxCoeff();

  if (trials > 0) {
    rep.trials = trials;
    std::vector<double> values(trials);
    const double sd = std::sqrt(eta);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < trials; ++t) {
      Rng rng(derive_seed(seed, t));
      Eigen::VectorXd x(p);
      for (int a = 0; a < p; ++a) x(a) = sd * rng.next_gaussian();
      double acc = x(i) * x(j);
      for (int step = 1; step < window; ++step) {
        Eigen::VectorXd g(p);
        for (int a = 0; a < p; ++a) g(a) = sd * rng.next_gaussian();
        x = B * x + g;
        acc += x(i) * x(j);
      }
      values[t] = acc / window;
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= trials;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= std::max(1, trials - 1);
    rep.mc_mean = mean;
    rep.mc_std_error = std::sqrt(var / trials);
    rep.mc_within_3sigma =
        std::abs(mean - rep.expected_qij) <= 3.0 * rep.mc_std_error + 1e-12;
  }
  return rep;
}

DLimitReport verify_d_limit(const SystemModel& model, std::vector<double> eta_grid) {
  if (eta_grid.empty()) throw Error("bad-input", "eta grid must be nonempty");
  for (std::size_t idx = 0; idx < eta_grid.size(); ++idx) {
    if (!(eta_grid[idx] > 0.0)) throw Error("bad-input", "eta grid must be positive");
    if (idx > 0 && !(eta_grid[idx] < eta_grid[idx - 1]))
      throw Error("bad-input", "eta grid must decrease");
  }

  DLimitReport rep;
  rep.eta_grid = std::move(eta_grid);
  for (double eta : rep.eta_grid)
    rep.d_values.push_back((1.0 - sigma_max_step(model.A, eta)) / eta);

  Eigen::MatrixXd sym = 0.5 * (model.A + model.A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  rep.rho_min_value = -es.eigenvalues().maxCoeff();
  rep.minus_lambda_min_sym = -es.eigenvalues().minCoeff();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram(model.A.transpose() * model.A,
                                                      Eigen::EigenvaluesOnly);
  rep.tol_bracket = rep.eta_grid.back() * gram.eigenvalues().maxCoeff();
  const double last = rep.d_values.back();
  rep.bracketed = last >= rep.rho_min_value - rep.tol_bracket &&
                  last <= rep.minus_lambda_min_sym + rep.tol_bracket;
  return rep;
}

LaplacianIncoherenceReport verify_laplacian_incoherence(const Eigen::MatrixXi& adjacency, int m,
                                                        int row, int walks, std::uint64_t seed) {
  SystemModel model = make_laplacian_model(adjacency, static_cast<double>(m));
  const int p = model.p();
  if (row < 0 || row >= p) throw Error("bad-input", "row index out of range");
  const std::vector<int>& S = model.support(row);
  std::vector<int> sc = complement_of(S, p);

  LaplacianIncoherenceReport rep;
  const int k = model.ensemble.max_degree;
  rep.bound = static_cast<double>(k) / (k + m);

  Eigen::MatrixXd Q0 = solve_lyapunov_continuous(model).Q;
  if (!sc.empty()) {
    Eigen::MatrixXd qss = submatrix(Q0, S, S);
    Eigen::MatrixXd qcs = submatrix(Q0, sc, S);
    rep.norm_via_covariance =
        inf_operator_norm(qss.ldlt().solve(qcs.transpose()).transpose());

    Eigen::MatrixXd acc = submatrix(model.A, sc, sc);
    Eigen::MatrixXd acs = submatrix(model.A, sc, S);
    Eigen::MatrixXd ratio = acc.ldlt().solve(acs);
    rep.norm_via_dynamics = inf_operator_norm(ratio);

    if (walks > 0) {
      Eigen::VectorXd row_sums = ratio.cwiseAbs().rowwise().sum();
      int arg = 0;
      row_sums.maxCoeff(&arg);
      rep.walker_node = sc[arg];
      rep.walker_row_value = row_sums(arg);
      rep.walks = walks;

      std::vector<std::vector<int>> nbrs(p);
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b)
          if (adjacency(a, b)) nbrs[a].push_back(b);
      std::vector<char> in_s(p, 0);
      for (int s : S) in_s[s] = 1;

      const double step_value = static_cast<double>(k) / (k + m);
      double sum = 0.0, sumsq = 0.0;
      Rng rng(seed);
      for (int w = 0; w < walks; ++w) {
        int node = rep.walker_node;
        long long t = 0;
        double value = 0.0;
        while (t < 1000000) {
          node = nbrs[node][rng.next_below(static_cast<std::uint64_t>(nbrs[node].size()))];
          ++t;
          if (in_s[node]) {
            value = std::pow(step_value, static_cast<double>(t));
            break;
          }
        }
        sum += value;
        sumsq += value * value;
      }
      rep.mc_estimate = sum / walks;
      double var = (sumsq - sum * sum / walks) / std::max(1, walks - 1);
      rep.mc_std_error = std::sqrt(std::max(0.0, var) / walks);
      rep.mc_consistent =
          rep.walker_row_value <= rep.mc_estimate + 3.0 * rep.mc_std_error + 1e-12;
    }
  }

  rep.equality_gap = std::abs(rep.norm_via_covariance - rep.norm_via_dynamics);
  rep.equal_ok = rep.equality_gap <= 1e-10;
  rep.bound_ok = rep.norm_via_dynamics <= rep.bound + 1e-12;
  return rep;
}

Eigen::MatrixXi random_connected_graph(int p, int max_degree, std::uint64_t seed) {
  if (p < 2 || max_degree < 2) throw Error("bad-input", "need p >= 2 and max degree >= 2");
  Rng rng(seed);
  Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(p, p);
  std::vector<int> degree(p, 0);

  // random tree first, attaching each node to one with spare degree
  for (int v = 1; v < p; ++v) {
    std::vector<int> open;
    for (int u = 0; u < v; ++u)
      if (degree[u] < max_degree) open.push_back(u);
    int u = open[rng.next_below(open.size())];
    adj(u, v) = adj(v, u) = 1;
    ++degree[u];
    ++degree[v];
  }
  // sprinkle extra edges under the cap
  for (int attempt = 0; attempt < 2 * p; ++attempt) {
    int a = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(p)));
    int b = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(p)));
    if (a == b || adj(a, b) || degree[a] >= max_degree || degree[b] >= max_degree) continue;
    adj(a, b) = adj(b, a) = 1;
    ++degree[a];
    ++degree[b];
  }
  return adj;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

SuiteResult run_appendix_verification(std::uint64_t seed, bool quick) {
  SuiteResult result;
  auto add = [&result](const std::string& name, bool ok, const std::string& detail) {
    result.lines.push_back({name, ok, detail});
  };

  {  // block-ratio decomposition: identity everywhere, bounds under the precondition
    const int draws = quick ? 100 : 1000;
    int identity_fail = 0, bound_fail = 0, usable = 0;
    double worst_residual = 0.0;
    for (int d = 0; d < draws; ++d) {
      SystemModel model = make_random_stable_model(6, derive_seed(seed, 1, d), 1.0);
      Eigen::MatrixXd Q0 = solve_lyapunov_continuous(model).Q;
      std::vector<int> S = {0, 3};
      double c_min = min_eigenvalue(submatrix(Q0, S, S));

      Rng rng(derive_seed(seed, 2, d));
      Eigen::MatrixXd noise(6, 6);
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) noise(a, b) = rng.next_gaussian();
      noise = 0.5 * (noise + noise.transpose()).eval();
      double scale = 0.2 * c_min / std::max(1e-12, std::abs(min_eigenvalue(noise)));
      Eigen::MatrixXd Q_hat = Q0 + scale * noise;

      DecompositionReport rep = verify_decomposition(Q_hat, Q0, S);
      worst_residual = std::max(worst_residual, rep.identity_residual);
      if (!rep.identity_ok) ++identity_fail;
      if (rep.precondition_ok) {
        ++usable;
        if (!rep.bounds_ok) ++bound_fail;
      }
    }
    add("block-ratio-identity", identity_fail == 0,
        "worst residual " + fmt(worst_residual) + " over " + std::to_string(draws) + " draws");
    add("block-ratio-bounds", bound_fail == 0 && usable >= draws / 4,
        std::to_string(usable) + " draws met the precondition, " +
            std::to_string(bound_fail) + " bound violations");
  }

  {  // spectral claims for the two quadratic-form matrices
    const int draws = quick ? 20 : 100;
    bool ok = true;
    std::string detail;
    SystemModel scalar = make_explicit_model(-Eigen::MatrixXd::Identity(1, 1));
    SpectralReport srep = verify_spectral_lemmas(scalar, 0.1, 8, 4, 0, 0, 0);
    ok = ok && srep.all_ok;
    detail = "scalar max|eig| " + fmt(srep.max_abs_eig_gradient) + " vs cap " +
             fmt(srep.bound_max_gradient);
    int fails = 0;
    for (int d = 0; d < draws; ++d) {
      SystemModel model = make_random_stable_model(2, derive_seed(seed, 3, d), 0.5);
      Rng rng(derive_seed(seed, 4, d));
      int r = static_cast<int>(rng.next_below(2));
      int j = static_cast<int>(rng.next_below(2));
      int i = static_cast<int>(rng.next_below(2));
      SpectralReport rep = verify_spectral_lemmas(model, 0.1, 8, 4, r, j, i);
      if (!rep.all_ok) ++fails;
    }
    add("quadratic-form-spectra", ok && fails == 0,
        detail + "; " + std::to_string(fails) + "/" + std::to_string(draws) +
            " random-model failures");
  }

  {  // windowed-average bias against the stationary value
    const int trials = quick ? 20000 : 100000;
    SystemModel scalar = make_explicit_model(-Eigen::MatrixXd::Identity(1, 1));
    BiasReport mc = verify_bias_bound(scalar, 0.1, 50, 10, 0, 0, trials, derive_seed(seed, 5));
    bool ok = mc.within && mc.mc_within_3sigma && mc.series_vs_solver <= 1e-8;
    std::string detail = "scalar bias " + fmt(mc.bias) + " <= " + fmt(mc.bound) +
                         ", mc gap " + fmt(std::abs(mc.mc_mean - mc.expected_qij)) + " (3sigma " +
                         fmt(3.0 * mc.mc_std_error) + ")";

    SystemModel grid_model = make_random_stable_model(3, derive_seed(seed, 6), 0.5);
    int grid_fails = 0;
    for (auto [n, m] : std::vector<std::pair<int, int>>{{10, 5}, {25, 10}, {50, 10}, {100, 20}})
      for (auto [i, j] : std::vector<std::pair<int, int>>{{0, 1}, {1, 1}, {2, 0}}) {
        BiasReport rep = verify_bias_bound(grid_model, 0.1, n, m, i, j);
        if (!rep.within || rep.series_vs_solver > 1e-8) ++grid_fails;
      }
    add("windowed-average-bias", ok && grid_fails == 0,
        detail + "; " + std::to_string(grid_fails) + " grid failures");
  }

  {  // contraction margin limit
    SystemModel diag = make_explicit_model(-Eigen::MatrixXd::Identity(3, 3));
    DLimitReport drep = verify_d_limit(diag, {0.1, 0.05, 0.01});
    bool diag_exact = true;
    for (double v : drep.d_values) diag_exact = diag_exact && std::abs(v - 1.0) <= 1e-9;

    Eigen::MatrixXd nn(2, 2);
    nn << -1.0, 4.0, 0.0, -1.0;
    DLimitReport nrep = verify_d_limit(make_explicit_model(nn), {1e-1, 1e-2, 1e-3, 1e-4});
    bool diffs_shrink = true;
    for (std::size_t idx = 2; idx < nrep.d_values.size(); ++idx) {
      double prev = std::abs(nrep.d_values[idx - 1] - nrep.d_values[idx - 2]);
      double cur = std::abs(nrep.d_values[idx] - nrep.d_values[idx - 1]);
      diffs_shrink = diffs_shrink && cur <= prev + 1e-12;
    }
    add("contraction-limit", drep.bracketed && diag_exact && nrep.bracketed && diffs_shrink,
        "final D " + fmt(nrep.d_values.back()) + " in [" + fmt(nrep.rho_min_value) + ", " +
            fmt(nrep.minus_lambda_min_sym) + "]");
  }

  {  // laplacian incoherence: identity, bound, walk cross-check
    Eigen::MatrixXi cycle = Eigen::MatrixXi::Zero(6, 6);
    for (int v = 0; v < 6; ++v) {
      cycle(v, (v + 1) % 6) = 1;
      cycle((v + 1) % 6, v) = 1;
    }
    LaplacianIncoherenceReport crep =
        verify_laplacian_incoherence(cycle, 2, 0, quick ? 10000 : 40000, derive_seed(seed, 7));
    bool ok = crep.equal_ok && crep.bound_ok && crep.mc_consistent;

    const int draws = quick ? 20 : 100;
    int fails = 0;
    double worst_gap = crep.equality_gap;
    for (int d = 0; d < draws; ++d) {
      Eigen::MatrixXi adj = random_connected_graph(12, 4, derive_seed(seed, 8, d));
      Rng rng(derive_seed(seed, 9, d));
      int row = static_cast<int>(rng.next_below(12));
      LaplacianIncoherenceReport rep = verify_laplacian_incoherence(adj, 1, row);
      worst_gap = std::max(worst_gap, rep.equality_gap);
      if (!rep.equal_ok || !rep.bound_ok) ++fails;
    }
    add("laplacian-incoherence", ok && fails == 0,
        "cycle norm " + fmt(crep.norm_via_dynamics) + " <= " + fmt(crep.bound) +
            ", worst route gap " + fmt(worst_gap) + ", " + std::to_string(fails) +
            " random-graph failures");
  }

  result.all_ok = true;
  for (const auto& line : result.lines) result.all_ok = result.all_ok && line.ok;
  return result;
}

}  // namespace sdenet
