#pragma once

#include <string>

namespace sdenet {

// Which recovery guarantee supplies the lambda / horizon formula: generic
// continuous observation, homogeneous laplacian ensemble, or discrete samples.
enum class GuaranteeRule { Continuous, Laplacian, Discrete };

const char* guarantee_rule_name(GuaranteeRule rule);
GuaranteeRule parse_guarantee_rule(const std::string& name);

struct RuleParams {
  int p = 0;
  double failure_prob = 0.0;  // in (0,1)
  double horizon = 0.0;       // T, or n*eta for the discrete rule
  double alpha = 0.0;
  double rho_min = 0.0;  // continuous rule
  double D = 0.0;        // discrete rule
  int k = 0;             // laplacian rule
  double m = 0.0;        // laplacian rule
};

double rule_lambda(const RuleParams& params, GuaranteeRule rule);

struct BoundParams {
  int p = 0;
  int k = 0;
  double failure_prob = 0.0;
  double alpha = 0.0;
  double rho_min = 0.0;
  double D = 0.0;
  double A_min = 0.0;
  double C_min = 0.0;
  double m = 0.0;
};

// Minimum observation interval (T, or n*eta for the discrete rule) the
// corresponding guarantee demands.
double horizon_bound(const BoundParams& params, GuaranteeRule rule);

}  // namespace sdenet
