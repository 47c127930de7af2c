#pragma once

#include <iosfwd>
#include <string>

#include "sdenet/conditions.hpp"
#include "sdenet/recover.hpp"
#include "sdenet/simulate.hpp"

namespace sdenet {

enum class ReportFormat { Csv, Json };

ReportFormat parse_report_format(const std::string& name);

// Matrix files hold square matrices: the dimension p on the first line, then
// p rows of p reals at 17 significant digits so a write/read round trip is
// exact.
void write_matrix(const std::string& path, const Eigen::MatrixXd& M);
Eigen::MatrixXd read_matrix(const std::string& path);

// Trajectory files carry one header line
//   eta=<real> n=<int> p=<int> provenance=<tag> seed=<int>
// followed by the n+1 eta-spaced samples, one state per line. The
// inner-resolution path of a continuous simulation is never persisted.
void write_trajectory(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory(const std::string& path);

void write_network_report(std::ostream& out, const NetworkEstimate& estimate,
                          ReportFormat format);
void write_condition_report(std::ostream& out, const ConditionReport& report,
                            ReportFormat format);

std::string signed_support_string(const Eigen::VectorXi& signs);

}  // namespace sdenet
