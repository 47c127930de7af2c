#include "sdenet/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "sdenet/error.hpp"

namespace sdenet {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_rows(std::ostream& out, const Eigen::MatrixXd& M) {
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      if (c) out << ' ';
      out << num(M(r, c));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_rows(std::istream& in, Eigen::Index rows, Eigen::Index cols,
                          const std::string& what) {
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      if (!(in >> M(r, c))) throw Error("bad-file", "truncated " + what);
  return M;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("bad-file", "cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("bad-file", "cannot read " + path);
  return in;
}

Provenance parse_provenance(const std::string& tag) {
  for (Provenance p : {Provenance::DiscreteNative, Provenance::SubsampledContinuous,
                       Provenance::Coupled})
    if (tag == provenance_name(p)) return p;
  throw Error("bad-file", "unknown provenance tag " + tag);
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  throw Error("bad-input", "unknown format " + name + " (expected csv or json)");
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols() || M.rows() < 1)
    throw Error("bad-input", "matrix files hold square matrices");
  auto out = open_out(path);
  out << M.rows() << '\n';
  write_rows(out, M);
}

Eigen::MatrixXd read_matrix(const std::string& path) {
  auto in = open_in(path);
  Eigen::Index p = 0;
  if (!(in >> p) || p < 1) throw Error("bad-file", "bad matrix header in " + path);
  return read_rows(in, p, p, path);
}

// Trajectory files hold the eta-spaced samples only; the inner-resolution
// path from a continuous simulation stays in memory.
void write_trajectory(const std::string& path, const Trajectory& traj) {
  auto out = open_out(path);
  out << "eta=" << num(traj.eta) << " n=" << traj.n() << " p=" << traj.p()
      << " provenance=" << provenance_name(traj.provenance) << " seed=" << traj.seed << '\n';
  write_rows(out, traj.samples.transpose());
}

Trajectory read_trajectory(const std::string& path) {
  auto in = open_in(path);
  std::string header;
  if (!std::getline(in, header)) throw Error("bad-file", "empty trajectory file " + path);

  Trajectory traj;
  int n = -1, p = -1;
  std::istringstream hs(header);
  std::string token;
  while (hs >> token) {
    auto eq = token.find('=');
    if (eq == std::string::npos) throw Error("bad-file", "bad header token " + token);
    std::string key = token.substr(0, eq), value = token.substr(eq + 1);
    if (key == "eta") traj.eta = std::stod(value);
    else if (key == "n") n = std::stoi(value);
    else if (key == "p") p = std::stoi(value);
    else if (key == "provenance") traj.provenance = parse_provenance(value);
    else if (key == "seed") traj.seed = std::stoull(value);
    else throw Error("bad-file", "unknown header key " + key);
  }
  if (n < 0 || p < 1) throw Error("bad-file", "incomplete trajectory header in " + path);

  traj.delta = traj.eta;
  traj.samples = read_rows(in, n + 1, p, path).transpose();
  return traj;
}

std::string signed_support_string(const Eigen::VectorXi& signs) {
  std::string s(static_cast<std::size_t>(signs.size()), '0');
  for (Eigen::Index i = 0; i < signs.size(); ++i)
    s[static_cast<std::size_t>(i)] = signs(i) > 0 ? '+' : (signs(i) < 0 ? '-' : '0');
  return s;
}

void write_network_report(std::ostream& out, const NetworkEstimate& estimate,
                          ReportFormat format) {
  if (format == ReportFormat::Csv) {
    out << "row,lambda,kkt_residual,iterations,signed_support,a_hat\n";
    for (std::size_t r = 0; r < estimate.rows.size(); ++r) {
      const RowRecovery& rec = estimate.rows[r];
      out << r << ',' << num(rec.lambda_used) << ',' << num(rec.estimate.kkt_residual) << ','
          << rec.estimate.iterations << ',' << signed_support_string(rec.estimate.signed_support);
      for (Eigen::Index c = 0; c < rec.estimate.a_hat.size(); ++c)
        out << ',' << num(rec.estimate.a_hat(c));
      out << '\n';
    }
    return;
  }
  nlohmann::json j;
  j["truth_known"] = estimate.truth_known;
  if (estimate.truth_known) j["all_rows_succeed"] = estimate.all_rows_succeed;
  j["rows"] = nlohmann::json::array();
  for (std::size_t r = 0; r < estimate.rows.size(); ++r) {
    const RowRecovery& rec = estimate.rows[r];
    nlohmann::json row;
    row["row"] = r;
    row["lambda"] = rec.lambda_used;
    row["kkt_residual"] = rec.estimate.kkt_residual;
    row["iterations"] = rec.estimate.iterations;
    row["converged"] = rec.estimate.converged;
    if (estimate.truth_known) row["success"] = rec.success;
    row["signed_support"] = signed_support_string(rec.estimate.signed_support);
    row["coefficients"] = std::vector<double>(
        rec.estimate.a_hat.data(), rec.estimate.a_hat.data() + rec.estimate.a_hat.size());
    j["rows"].push_back(std::move(row));
  }
  out << j.dump(2) << '\n';
}

namespace {

template <typename Emit>
void each_condition_field(const ConditionReport& rep, Emit emit) {
  emit("row", static_cast<double>(rep.row));
  emit("k", static_cast<double>(rep.k));
  emit("A_min", rep.A_min);
  emit("failure_prob", rep.failure_prob);
  emit("C_min", rep.C_min);
  emit("alpha", rep.alpha);
  emit("rho_min", rep.rho_min);
  if (rep.eta) emit("eta", *rep.eta);
  if (rep.sigma_max) emit("sigma_max", *rep.sigma_max);
  if (rep.D) emit("D", *rep.D);
  if (rep.c_min_step) emit("C_min_step", *rep.c_min_step);
  if (rep.alpha_step) emit("alpha_step", *rep.alpha_step);
  if (rep.horizon_continuous) emit("horizon_continuous", *rep.horizon_continuous);
  if (rep.horizon_laplacian) emit("horizon_laplacian", *rep.horizon_laplacian);
  if (rep.horizon_discrete) emit("horizon_discrete", *rep.horizon_discrete);
  emit("hypothesis_ok", rep.hypothesis_ok ? 1.0 : 0.0);
}

}  // namespace

void write_condition_report(std::ostream& out, const ConditionReport& report,
                            ReportFormat format) {
  if (format == ReportFormat::Csv) {
    each_condition_field(report,
                         [&out](const char* name, double v) { out << name << " = " << num(v) << '\n'; });
    std::ostringstream support;
    for (std::size_t i = 0; i < report.support.size(); ++i)
      support << (i ? " " : "") << report.support[i];
    out << "support = " << support.str() << '\n';
    if (report.prop3) {
      for (int c = 0; c < 4; ++c)
        out << Prop3Report::condition_name(c) << " = " << num(report.prop3->measured[c])
            << " (bound " << num(report.prop3->bound[c]) << ", "
            << (report.prop3->holds[c] ? "holds" : "violated") << ")\n";
      out << "all_conditions_hold = " << (report.prop3->all_hold ? 1 : 0) << '\n';
    }
    return;
  }
  nlohmann::json j;
  each_condition_field(report, [&j](const char* name, double v) { j[name] = v; });
  j["support"] = report.support;
  if (report.prop3) {
    nlohmann::json p3;
    for (int c = 0; c < 4; ++c) {
      nlohmann::json cond;
      cond["measured"] = report.prop3->measured[c];
      cond["bound"] = report.prop3->bound[c];
      cond["holds"] = report.prop3->holds[c];
      p3[Prop3Report::condition_name(c)] = std::move(cond);
    }
    p3["all_hold"] = report.prop3->all_hold;
    j["recovery_conditions"] = std::move(p3);
  }
  out << j.dump(2) << '\n';
}

}  // namespace sdenet
