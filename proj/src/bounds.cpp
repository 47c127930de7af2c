#include "sdenet/bounds.hpp"

#include <cmath>

#include "sdenet/error.hpp"

namespace sdenet {

const char* guarantee_rule_name(GuaranteeRule rule) {
  switch (rule) {
    case GuaranteeRule::Continuous: return "continuous";
    case GuaranteeRule::Laplacian: return "laplacian";
    case GuaranteeRule::Discrete: return "discrete";
  }
  return "continuous";
}

GuaranteeRule parse_guarantee_rule(const std::string& name) {
  if (name == "continuous") return GuaranteeRule::Continuous;
  if (name == "laplacian") return GuaranteeRule::Laplacian;
  if (name == "discrete") return GuaranteeRule::Discrete;
  throw Error("bad-input", "unknown guarantee rule: " + name);
}

namespace {

void need_positive(double v, const char* what) {
  if (!(v > 0.0)) throw Error("bad-input", std::string(what) + " must be positive");
}

double log_term(int p, double failure_prob, int multiplier) {
  need_positive(p, "p");
  if (!(failure_prob > 0.0 && failure_prob < 1.0))
    throw Error("bad-input", "failure probability must lie in (0,1)");
  return std::log(multiplier * static_cast<double>(p) / failure_prob);
}

}  // namespace

double rule_lambda(const RuleParams& params, GuaranteeRule rule) {
  const double lt = log_term(params.p, params.failure_prob, 4);
  need_positive(params.horizon, "horizon");
  switch (rule) {
    case GuaranteeRule::Continuous:
      need_positive(params.alpha, "alpha");
      need_positive(params.rho_min, "rho_min");
      return std::sqrt(36.0 * lt /
                       (params.horizon * params.alpha * params.alpha * params.rho_min));
    case GuaranteeRule::Laplacian: {
      need_positive(params.k, "k");
      need_positive(params.m, "m");
      const double km = params.k + params.m;
      const double m = params.m;
      return std::sqrt(36.0 * km * km * lt / (params.horizon * m * m * m));
    }
    case GuaranteeRule::Discrete:
      need_positive(params.alpha, "alpha");
      need_positive(params.D, "D");
      return std::sqrt(36.0 * lt / (params.D * params.alpha * params.alpha * params.horizon));
  }
  throw Error("bad-input", "unknown guarantee rule");
}

double horizon_bound(const BoundParams& params, GuaranteeRule rule) {
  need_positive(params.k, "k");
  need_positive(params.p, "p");
  if (!(params.failure_prob > 0.0 && params.failure_prob < 1.0))
    throw Error("bad-input", "failure probability must lie in (0,1)");
  const double k = params.k;
  const double lt = std::log(4.0 * params.p * k / params.failure_prob);
  switch (rule) {
    case GuaranteeRule::Continuous: {
      need_positive(params.alpha, "alpha");
      need_positive(params.rho_min, "rho_min");
      need_positive(params.A_min, "A_min");
      need_positive(params.C_min, "C_min");
      const double rho = params.rho_min;
      return 1e4 * k * k * (k / (rho * rho) + 1.0 / (params.A_min * params.A_min)) /
             (params.alpha * params.alpha * rho * params.C_min * params.C_min) * lt;
    }
    case GuaranteeRule::Laplacian: {
      need_positive(params.m, "m");
      const double m = params.m;
      return 2e5 * k * k * std::pow((k + m) / m, 5.0) * (k + m * m) * lt;
    }
    case GuaranteeRule::Discrete: {
      need_positive(params.alpha, "alpha");
      need_positive(params.D, "D");
      need_positive(params.A_min, "A_min");
      need_positive(params.C_min, "C_min");
      const double D = params.D;
      return 1e4 * k * k * (k / (D * D) + 1.0 / (params.A_min * params.A_min)) /
             (params.alpha * params.alpha * D * params.C_min * params.C_min) * lt;
    }
  }
  throw Error("bad-input", "unknown guarantee rule");
}

}  // namespace sdenet
